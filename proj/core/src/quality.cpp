#include "aperture_forge/quality.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "aperture_forge/fft.hpp"

namespace apf {

namespace {

void require_gradients(const Plane& img) {
  if (img.width() < 2 || img.height() < 2) throw DimensionError("quality measures need at least 2x2 pixels");
}

template <typename Fn>
void for_each_gradient(const Plane& img, Fn&& fn) {
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x + 1 < img.width(); ++x) fn(img(x + 1, y) - img(x, y));
  for (int y = 0; y + 1 < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) fn(img(x, y + 1) - img(x, y));
}

Plane gradient_magnitude(const Plane& img) {
  Plane out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double gx = x + 1 < img.width() ? img(x + 1, y) - img(x, y) : 0.0;
      const double gy = y + 1 < img.height() ? img(x, y + 1) - img(x, y) : 0.0;
      out(x, y) = std::hypot(gx, gy);
    }
  return out;
}

Plane max_filter3(const Plane& img) {
  Plane out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      double m = img(x, y);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx;
          const int yy = y + dy;
          if (xx >= 0 && yy >= 0 && xx < img.width() && yy < img.height()) m = std::max(m, img(xx, yy));
        }
      out(x, y) = m;
    }
  return out;
}

Plane downsample2(const Plane& img) {
  Plane out(img.width() / 2, img.height() / 2);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x)
      out(x, y) = 0.25 * (img(2 * x, 2 * y) + img(2 * x + 1, 2 * y) + img(2 * x, 2 * y + 1) + img(2 * x + 1, 2 * y + 1));
  return out;
}

}  // namespace

double norm_sparsity(const Plane& img) {
  require_gradients(img);
  double l1 = 0.0;
  double l2 = 0.0;
  for_each_gradient(img, [&](double g) {
    l1 += std::abs(g);
    l2 += g * g;
  });
  return l2 > 0.0 ? l1 / std::sqrt(l2) : 0.0;
}

double norm_sparsity(const Image& img) { return norm_sparsity(img.plane()); }

double sparsity_prior(const Plane& img) {
  require_gradients(img);
  double sum = 0.0;
  for_each_gradient(img, [&](double g) { sum += std::pow(std::abs(g), 0.8); });
  return sum;
}

double sparsity_prior(const Image& img) { return sparsity_prior(img.plane()); }

double sparsity_density(const Plane& img) { return sparsity_prior(img) / static_cast<double>(img.size()); }

double periodic_tv(const Plane& img) {
  const int w = img.width();
  const int h = img.height();
  double tv = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      tv += std::abs(img((x + 1) % w, y) - img(x, y)) + std::abs(img(x, (y + 1) % h) - img(x, y));
  return tv;
}

Plane periodic_component(const Plane& img) {
  const int w = img.width();
  const int h = img.height();
  // Boundary jumps, the source term of the smooth component's Poisson problem.
  Plane v(w, h);
  for (int x = 0; x < w; ++x) {
    const double d = img(x, h - 1) - img(x, 0);
    v(x, 0) += d;
    v(x, h - 1) -= d;
  }
  for (int y = 0; y < h; ++y) {
    const double d = img(w - 1, y) - img(0, y);
    v(0, y) += d;
    v(w - 1, y) -= d;
  }
  Spectrum s = dft(v, w, h);
  for (int q = 0; q < h; ++q)
    for (int r = 0; r < w; ++r) {
      const double den = 2.0 * std::cos(2.0 * std::numbers::pi * q / h) + 2.0 * std::cos(2.0 * std::numbers::pi * r / w) - 4.0;
      s(r, q) = (q == 0 && r == 0) ? std::complex<double>{} : s(r, q) / den;
    }
  const Plane smooth = idft(s);
  Plane out(w, h);
  auto o = out.values();
  auto a = img.values();
  auto b = smooth.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a[i] - b[i];
  return out;
}

double neg_log10_gaussian_tail(double x) {
  if (x < 25.0) return -std::log10(0.5 * std::erfc(x / std::numbers::sqrt2));
  // Mills ratio: Phi(x) ~ exp(-x^2/2) / (x sqrt(2 pi)).
  return (0.5 * x * x + std::log(x * std::sqrt(2.0 * std::numbers::pi))) / std::numbers::ln10;
}

void SharpnessOptions::validate() const {
  if (surrogates < 2) throw ConfigError("sharpness index needs at least 2 surrogates");
  if (!(clamp_max > 0.0)) throw ConfigError("sharpness clamp must be positive");
}

double sharpness_from_moments(double tv, double mu, double sigma, double clamp_max) {
  if (!(sigma > 0.0)) return 0.0;
  return std::clamp(neg_log10_gaussian_tail((mu - tv) / sigma), 0.0, clamp_max);
}

double sharpness_index(const Plane& img, const SharpnessOptions& opts) {
  opts.validate();
  if (img.width() < 8 || img.height() < 8) throw DimensionError("sharpness index needs at least 8x8 pixels");
  const Plane u = opts.periodic ? periodic_component(img) : img;
  const int w = u.width();
  const int h = u.height();
  const Spectrum spec = dft(u, w, h);

  std::seed_seq seq{opts.seed, static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(h)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  Plane noise(w, h);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int m = 0; m < opts.surrogates; ++m) {
    for (double& v : noise.values()) v = normal(rng);
    Spectrum phase = dft(noise, w, h);
    auto p = phase.values();
    auto f = spec.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double mag = std::abs(p[i]);
      p[i] = mag > 0.0 ? std::abs(f[i]) * p[i] / mag : std::complex<double>{};
    }
    const double tv = periodic_tv(idft(phase));
    sum += tv;
    sum_sq += tv * tv;
  }
  const double n = opts.surrogates;
  const double mu = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mu * mu) / (n - 1.0));
  return sharpness_from_moments(periodic_tv(u), mu, std::sqrt(var), opts.clamp_max);
}

double sharpness_index(const Image& img, const SharpnessOptions& opts) { return sharpness_index(img.plane(), opts); }

void RingOptions::validate() const {
  if (levels < 1) throw ConfigError("pyramid ring needs at least one level");
  if (!(alpha > 0.0)) throw ConfigError("pyramid ring alpha must be positive");
}

double pyramid_ring(const Plane& blurred, const Plane& deblurred, const RingOptions& opts) {
  opts.validate();
  if (!blurred.same_shape(deblurred)) throw DimensionError("pyramid_ring: image size mismatch");
  Plane b = blurred;
  Plane d = deblurred;
  double total = 0.0;
  for (int level = 0; level < opts.levels && b.width() >= 2 && b.height() >= 2; ++level) {
    const Plane gb = max_filter3(gradient_magnitude(b));
    const Plane gd = gradient_magnitude(d);
    double excess = 0.0;
    auto pb = gb.values();
    auto pd = gd.values();
    for (std::size_t i = 0; i < pd.size(); ++i) excess += std::max(0.0, pd[i] - opts.alpha * pb[i]);
    total += excess / static_cast<double>(pd.size());
    b = downsample2(b);
    d = downsample2(d);
  }
  return total;
}

double pyramid_ring(const Image& blurred, const Image& deblurred, const RingOptions& opts) {
  return pyramid_ring(blurred.plane(), deblurred.plane(), opts);
}

double QualityReport::combine(double norm_sparsity, double sharpness_index, double sparsity_prior,
                              double pyramid_ring) {
  return QualityWeights::kNormSparsity * norm_sparsity + QualityWeights::kSharpness * sharpness_index +
         QualityWeights::kSparsity * sparsity_prior + QualityWeights::kRing * pyramid_ring;
}

QualityReport aggregate_quality(const Plane& blurred, const Plane& deblurred, const QualityOptions& opts) {
  if (!blurred.same_shape(deblurred)) throw DimensionError("aggregate_quality: image size mismatch");
  QualityReport r;
  r.norm_sparsity = norm_sparsity(deblurred);
  r.sparsity_prior = sparsity_density(deblurred);
  r.sharpness_index = sharpness_index(deblurred, opts.sharpness);
  r.pyramid_ring = pyramid_ring(blurred, deblurred, opts.ring);
  r.aggregate = QualityReport::combine(r.norm_sparsity, r.sharpness_index, r.sparsity_prior, r.pyramid_ring);
  return r;
}

QualityReport aggregate_quality(const Image& blurred, const Image& deblurred, const QualityOptions& opts) {
  return aggregate_quality(blurred.plane(), deblurred.plane(), opts);
}

}  // namespace apf
