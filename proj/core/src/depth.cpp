#include "aperture_forge/depth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "aperture_forge/deconv.hpp"
#include "aperture_forge/maxflow.hpp"
#include "aperture_forge/parallel.hpp"

namespace apf {

KernelBank::KernelBank(std::map<int, Psf> entries) {
  if (entries.empty()) throw EmptyInputError("empty kernel bank");
  for (auto& [s, psf] : entries) {
    if (s == 0) throw DomainError("kernel bank has scale 0");
    scales_.push_back(s);
    psfs_.push_back(std::move(psf));
  }
}

KernelBank KernelBank::from_pattern(const AperturePattern& pattern, const std::vector<int>& scales) {
  std::map<int, Psf> entries;
  for (int s : scales)
    if (!entries.emplace(s, psf_from_pattern(pattern, BlurScale(s))).second)
      throw DomainError("repeated scale " + std::to_string(s));
  return KernelBank(std::move(entries));
}

KernelBank KernelBank::from_directory(const std::filesystem::path& dir) { return KernelBank(read_psf_bank(dir)); }

std::size_t KernelBank::index_of(int s) const {
  const auto it = std::lower_bound(scales_.begin(), scales_.end(), s);
  if (it == scales_.end() || *it != s) throw LegendError("scale " + std::to_string(s) + " is not in the kernel bank");
  return static_cast<std::size_t>(it - scales_.begin());
}

bool KernelBank::contains(int s) const { return std::binary_search(scales_.begin(), scales_.end(), s); }

const Psf& KernelBank::at_scale(int s) const { return psfs_[index_of(s)]; }

int KernelBank::max_side() const {
  int side = 0;
  for (const Psf& p : psfs_) side = std::max({side, p.width(), p.height()});
  return side;
}

std::vector<int> parse_scale_list(const std::string& text) {
  auto number = [&](std::string_view tok) {
    int v = 0;
    const char* b = tok.data();
    const char* e = tok.data() + tok.size();
    if (b != e && *b == '+') ++b;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr != e) throw FormatError("bad scale '" + std::string(tok) + "'");
    return v;
  };
  std::vector<int> out;
  const std::string_view all(text);
  if (const auto colon = all.find(':', 1); colon != std::string_view::npos) {
    const int lo = number(all.substr(0, colon));
    const int hi = number(all.substr(colon + 1));
    if (lo > hi) throw FormatError("scale range '" + text + "' is empty");
    for (int s = lo; s <= hi; ++s)
      if (s != 0) out.push_back(s);
  } else {
    std::size_t start = 0;
    while (start <= all.size()) {
      const auto comma = all.find(',', start);
      const auto tok = all.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      const int s = number(tok);
      if (s == 0) throw FormatError("scale 0 is undefined");
      out.push_back(s);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  if (out.empty()) throw FormatError("no scales in '" + text + "'");
  return out;
}

bool milder_scale(int a, int b) {
  const int aa = std::abs(a);
  const int bb = std::abs(b);
  if (aa != bb) return aa < bb;
  return a > b;
}

NsrMatrix estimation_nsr(int w, int h, const KernelBank& bank, double weight) {
  return canvas_nsr(w, h, bank.max_side(), weight);
}

std::vector<double> kernel_qualities(const Plane& patch, const KernelBank& bank, const NsrMatrix& c,
                                     const EstimateOptions& opts) {
  if (patch.width() < bank.max_side() || patch.height() < bank.max_side())
    throw DimensionError("patch smaller than the largest kernel");
  const int m = opts.margin;
  if (m < 0 || patch.width() - 2 * m < 8 || patch.height() - 2 * m < 8)
    throw DimensionError("estimation margin leaves less than 8x8 pixels");
  const int w = patch.width() - 2 * m;
  const int h = patch.height() - 2 * m;
  const Plane blurred = crop(patch, m, m, w, h);
  std::vector<double> q(bank.size());
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const Plane restored = crop(wiener_restore(patch, bank.at_index(k), c), m, m, w, h);
    q[k] = aggregate_quality(blurred, restored, opts.quality).aggregate;
  }
  return q;
}

std::vector<ScaleEstimate> estimate_from_qualities(const std::vector<double>& q, const KernelBank& bank) {
  if (q.size() != bank.size()) throw DimensionError("quality count does not match the bank");
  const auto& scales = bank.scales();
  std::vector<std::size_t> order(q.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (q[a] != q[b]) return q[a] > q[b];
    return milder_scale(scales[a], scales[b]);
  });
  if (order.size() == 1) return {ScaleEstimate{scales[order[0]], 1.0}};

  std::vector<double> sorted(q);
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double temperature = std::max(quantile(0.75) - quantile(0.25), 1e-6);
  const double p1 = 1.0 / (1.0 + std::exp((q[order[1]] - q[order[0]]) / temperature));
  return {ScaleEstimate{scales[order[0]], p1}, ScaleEstimate{scales[order[1]], 1.0 - p1}};
}

std::vector<ScaleEstimate> estimate_patch_scale(const Image& patch, const KernelBank& bank, const NsrMatrix& c,
                                                const EstimateOptions& opts) {
  if (bank.size() == 1) {
    if (patch.width() < bank.max_side() || patch.height() < bank.max_side())
      throw DimensionError("patch smaller than the largest kernel");
    return {ScaleEstimate{bank.scales()[0], 1.0}};
  }
  return estimate_from_qualities(kernel_qualities(patch.plane(), bank, c, opts), bank);
}

DepthVolume::DepthVolume(int w, int h, std::vector<int> legend_in)
    : width(w), height(h), legend(std::move(legend_in)) {
  probs.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * legend.size(), 0.0);
}

WindowGrid window_grid(int width, int height, int patch, int stride) {
  if (patch < 1 || stride < 1) throw DomainError("patch and stride must be positive");
  if (patch > width || patch > height) throw DimensionError("image smaller than the patch");
  auto axis = [&](int n) {
    std::vector<int> out;
    for (int o = 0; o + patch <= n; o += stride) out.push_back(o);
    if (out.back() + patch < n) out.push_back(n - patch);
    return out;
  };
  return WindowGrid{axis(width), axis(height)};
}

namespace {

// For each pixel coordinate, the window whose center is nearest (ties to the
// earlier window).
std::vector<std::size_t> nearest_window(const std::vector<int>& origins, int patch, int n) {
  std::vector<std::size_t> out(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < origins.size(); ++k) {
      const double d = std::abs(p - (origins[k] + 0.5 * (patch - 1)));
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    out[static_cast<std::size_t>(p)] = best;
  }
  return out;
}

}  // namespace

DepthVolume raw_depth_volume(const Image& img, const KernelBank& bank, const NsrMatrix& c, int patch, int stride,
                             const EstimateOptions& opts) {
  const WindowGrid grid = window_grid(img.width(), img.height(), patch, stride);
  const std::size_t nx = grid.xs.size();
  std::vector<std::vector<ScaleEstimate>> estimates(nx * grid.ys.size());
  parallel_for(estimates.size(), [&](std::size_t i) {
    const int x0 = grid.xs[i % nx];
    const int y0 = grid.ys[i / nx];
    estimates[i] = estimate_patch_scale(crop(img, x0, y0, patch, patch), bank, c, opts);
  });

  DepthVolume vol(img.width(), img.height(), bank.scales());
  const auto wx = nearest_window(grid.xs, patch, img.width());
  const auto wy = nearest_window(grid.ys, patch, img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (const ScaleEstimate& e : estimates[wy[static_cast<std::size_t>(y)] * nx + wx[static_cast<std::size_t>(x)]])
        vol.at(x, y, bank.index_of(e.scale)) += e.probability;
  return vol;
}

void MrfParams::validate() const {
  if (!(lambda0 >= 0.0)) throw ConfigError("lambda0 must be non-negative");
  if (!(sigma_lambda > 0.0)) throw ConfigError("sigma_lambda must be positive");
  if (!(gauss_std > 0.0)) throw ConfigError("gauss_std must be positive");
  if (!(prob_floor > 0.0 && prob_floor < 1.0)) throw ConfigError("prob_floor must be in (0, 1)");
}

DataTerm::DataTerm(int w, int h, std::vector<int> legend_in) : width(w), height(h), legend(std::move(legend_in)) {
  cost.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * legend.size(), 0.0);
}

DataTerm data_term(const DepthVolume& volume, const MrfParams& params) {
  params.validate();
  const std::size_t s = volume.labels();
  if (s == 0) throw EmptyInputError("depth volume has no labels");
  const int radius = static_cast<int>(std::floor(3.0 * params.gauss_std));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  for (int d = -radius; d <= radius; ++d)
    taps[static_cast<std::size_t>(d + radius)] = std::exp(-0.5 * d * d / (params.gauss_std * params.gauss_std));

  DataTerm out(volume.width, volume.height, volume.legend);
  std::vector<double> smoothed(s);
  for (int y = 0; y < volume.height; ++y)
    for (int x = 0; x < volume.width; ++x) {
      std::fill(smoothed.begin(), smoothed.end(), 0.0);
      // Each label spreads its mass over the in-range taps, renormalized, so
      // the total probability is preserved at the ends of the label axis.
      for (std::size_t k = 0; k < s; ++k) {
        const double p = volume.at(x, y, k);
        if (p == 0.0) continue;
        double norm = 0.0;
        for (int d = -radius; d <= radius; ++d) {
          const long t = static_cast<long>(k) + d;
          if (t >= 0 && t < static_cast<long>(s)) norm += taps[static_cast<std::size_t>(d + radius)];
        }
        for (int d = -radius; d <= radius; ++d) {
          const long t = static_cast<long>(k) + d;
          if (t >= 0 && t < static_cast<long>(s))
            smoothed[static_cast<std::size_t>(t)] += p * taps[static_cast<std::size_t>(d + radius)] / norm;
        }
      }
      for (std::size_t k = 0; k < s; ++k) out.at(x, y, k) = -std::log(std::max(smoothed[k], params.prob_floor));
    }
  return out;
}

double smoothness_lambda(double g_p, double g_q, const MrfParams& params) {
  const double d = g_p - g_q;
  const double v = params.lambda0 * std::exp(-d * d / (params.sigma_lambda * params.sigma_lambda));
  return v < 1e-300 ? 0.0 : v;
}

namespace {

struct Pair {
  int p;
  int q;
  double lambda;
};

// 8-neighbour pairs, each unordered pair once.
std::vector<Pair> neighbour_pairs(const Image& img, const MrfParams& params) {
  const int w = img.width();
  const int h = img.height();
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(w) * h * 4);
  constexpr int kOffsets[4][2] = {{1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (const auto& o : kOffsets) {
        const int xx = x + o[0];
        const int yy = y + o[1];
        if (xx < 0 || xx >= w || yy >= h) continue;
        pairs.push_back({y * w + x, yy * w + xx, smoothness_lambda(img(x, y), img(xx, yy), params)});
      }
  return pairs;
}

void check_data(const DataTerm& data, const Image& img) {
  if (data.labels() == 0) throw EmptyInputError("data term has no labels");
  if (data.width != img.width() || data.height != img.height())
    throw DimensionError("data term and image sizes differ");
  for (double v : data.cost)
    if (!std::isfinite(v)) throw DomainError("data term has a non-finite cost");
}

double energy_of(const DataTerm& data, const std::vector<int>& labels, const std::vector<Pair>& pairs) {
  double e = 0.0;
  const std::size_t s = data.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) e += data.cost[i * s + static_cast<std::size_t>(labels[i])];
  for (const Pair& pr : pairs)
    e += pr.lambda * label_distance(static_cast<std::size_t>(labels[static_cast<std::size_t>(pr.p)]),
                                    static_cast<std::size_t>(labels[static_cast<std::size_t>(pr.q)]));
  return e;
}

// Best labelling reachable from `labels` by switching any subset of pixels to
// alpha. x_p = 1 (sink side) means p takes alpha.
std::vector<int> expand(const DataTerm& data, const std::vector<int>& labels, const std::vector<Pair>& pairs,
                        int alpha) {
  const std::size_t n = labels.size();
  const std::size_t s = data.labels();
  const auto a = static_cast<std::size_t>(alpha);
  std::vector<double> cost0(n);
  std::vector<double> cost1(n);
  for (std::size_t i = 0; i < n; ++i) {
    cost0[i] = data.cost[i * s + static_cast<std::size_t>(labels[i])];
    cost1[i] = data.cost[i * s + a];
  }
  MaxFlow graph(static_cast<int>(n));
  for (const Pair& pr : pairs) {
    if (pr.lambda == 0.0) continue;
    const auto lp = static_cast<std::size_t>(labels[static_cast<std::size_t>(pr.p)]);
    const auto lq = static_cast<std::size_t>(labels[static_cast<std::size_t>(pr.q)]);
    const double e00 = pr.lambda * label_distance(lp, lq);
    const double e01 = pr.lambda * label_distance(lp, a);
    const double e10 = pr.lambda * label_distance(a, lq);
    // E = e00 + (e10 - e00) x_p + (0 - e10) x_q + (e01 + e10 - e00) (1 - x_p) x_q
    cost1[static_cast<std::size_t>(pr.p)] += e10 - e00;
    cost1[static_cast<std::size_t>(pr.q)] -= e10;
    const double coupling = e01 + e10 - e00;
    if (coupling > 0.0) graph.add_edge(pr.p, pr.q, coupling, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double d = cost1[i] - cost0[i];
    if (d > 0.0) graph.add_terminal(static_cast<int>(i), d, 0.0);
    else if (d < 0.0) graph.add_terminal(static_cast<int>(i), 0.0, -d);
  }
  graph.solve();
  std::vector<int> out(labels);
  for (std::size_t i = 0; i < n; ++i)
    if (graph.in_sink(static_cast<int>(i))) out[i] = alpha;
  return out;
}

}  // namespace

Grid<int> argmin_labels(const DataTerm& data) {
  Grid<int> out(data.width, data.height);
  for (int y = 0; y < data.height; ++y)
    for (int x = 0; x < data.width; ++x) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < data.labels(); ++k) {
        const double c = data.at(x, y, k);
        const double b = data.at(x, y, best);
        if (c < b || (c == b && milder_scale(data.legend[k], data.legend[best]))) best = k;
      }
      out(x, y) = static_cast<int>(best);
    }
  return out;
}

double mrf_energy(const DataTerm& data, const Grid<int>& labels, const Image& img, const MrfParams& params) {
  params.validate();
  check_data(data, img);
  if (labels.width() != data.width || labels.height() != data.height)
    throw DimensionError("label grid and data term sizes differ");
  for (int v : labels.values())
    if (v < 0 || static_cast<std::size_t>(v) >= data.labels()) throw LegendError("label outside the legend");
  const std::vector<int> flat(labels.values().begin(), labels.values().end());
  return energy_of(data, flat, neighbour_pairs(img, params));
}

DepthMap solve_mrf(const DataTerm& data, const Image& img, const MrfParams& params, MrfStats* stats) {
  params.validate();
  check_data(data, img);
  const std::vector<Pair> pairs = neighbour_pairs(img, params);
  const Grid<int> init = argmin_labels(data);
  std::vector<int> labels(init.values().begin(), init.values().end());
  double energy = energy_of(data, labels, pairs);
  MrfStats st;
  st.initial_energy = energy;

  const bool coupled = std::any_of(pairs.begin(), pairs.end(), [](const Pair& p) { return p.lambda > 0.0; });
  if (coupled && data.labels() > 1) {
    for (int sweep = 0; sweep < kMaxExpansionSweeps; ++sweep) {
      ++st.sweeps;
      bool improved = false;
      for (std::size_t alpha = 0; alpha < data.labels(); ++alpha) {
        std::vector<int> candidate = expand(data, labels, pairs, static_cast<int>(alpha));
        const double e = energy_of(data, candidate, pairs);
        if (e < energy - 1e-9 * std::max(1.0, std::abs(energy))) {
          labels = std::move(candidate);
          energy = e;
          improved = true;
        }
      }
      if (!improved) break;
    }
  }
  st.final_energy = energy;
  if (stats) *stats = st;

  DepthMap out{Grid<int>(data.width, data.height), data.legend};
  std::copy(labels.begin(), labels.end(), out.labels.values().begin());
  return out;
}

}  // namespace apf
