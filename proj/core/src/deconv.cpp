#include "aperture_forge/deconv.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "aperture_forge/fft.hpp"
#include "aperture_forge/parallel.hpp"

namespace apf {

int canvas_extent(int n, int kernel_side) { return fft_size(n + 2 * kernel_side); }

NsrMatrix canvas_nsr(int width, int height, int kernel_side, double weight) {
  return gradient_nsr(canvas_extent(width, kernel_side), canvas_extent(height, kernel_side), weight);
}

Plane smooth_pad(const Plane& img, int w, int h) {
  const int iw = img.width();
  const int ih = img.height();
  if (w < iw || h < ih) throw DimensionError("smooth_pad: canvas smaller than the image");
  Plane out(w, h);
  for (int y = 0; y < ih; ++y) {
    for (int x = 0; x < iw; ++x) out(x, y) = img(x, y);
    for (int x = iw; x < w; ++x) {
      const double t = static_cast<double>(x - iw + 1) / (w - iw + 1);
      out(x, y) = (1.0 - t) * img(iw - 1, y) + t * img(0, y);
    }
  }
  for (int y = ih; y < h; ++y) {
    const double t = static_cast<double>(y - ih + 1) / (h - ih + 1);
    for (int x = 0; x < w; ++x) out(x, y) = (1.0 - t) * out(x, ih - 1) + t * out(x, 0);
  }
  return out;
}

namespace {

void check_canvas(const Plane& img, const Psf& psf, const NsrMatrix& c) {
  if (psf.width() > img.width() || psf.height() > img.height())
    throw DimensionError("PSF larger than the image");
  if (c.width() < img.width() + psf.width() - 1 || c.height() < img.height() + psf.height() - 1)
    throw DimensionError("NSR canvas too small for the image and kernel");
}

Plane filter(const Plane& f, const Spectrum& k, bool adjoint) {
  Spectrum s = dft(f, f.width(), f.height());
  auto sv = s.values();
  auto kv = k.values();
  for (std::size_t i = 0; i < sv.size(); ++i) sv[i] *= adjoint ? std::conj(kv[i]) : kv[i];
  return idft(s);
}

// Periodic forward differences and their adjoints.
Plane diff_x(const Plane& f) {
  Plane g(f.width(), f.height());
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x) g(x, y) = f((x + 1) % f.width(), y) - f(x, y);
  return g;
}

Plane diff_y(const Plane& f) {
  Plane g(f.width(), f.height());
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x) g(x, y) = f(x, (y + 1) % f.height()) - f(x, y);
  return g;
}

Plane diff_x_t(const Plane& g) {
  Plane f(g.width(), g.height());
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) f(x, y) = g((x + g.width() - 1) % g.width(), y) - g(x, y);
  return f;
}

Plane diff_y_t(const Plane& g) {
  Plane f(g.width(), g.height());
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) f(x, y) = g(x, (y + g.height() - 1) % g.height()) - g(x, y);
  return f;
}

double dot(const Plane& a, const Plane& b) {
  double s = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
  return s;
}

void axpy(double alpha, const Plane& x, Plane& y) {
  auto xv = x.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < xv.size(); ++i) yv[i] += alpha * xv[i];
}

class SparseProblem {
 public:
  SparseProblem(const Plane& img, const Psf& psf, const DeconvConfig& cfg, int cw, int ch)
      : cfg_(cfg), iw_(img.width()), ih_(img.height()), y_(smooth_pad(img, cw, ch)),
        k_(kernel_spectrum(psf, cw, ch)) {}

  const Spectrum& kernel() const { return k_; }
  const Plane& data() const { return y_; }

  double rho(double g) const { return std::pow(g * g + cfg_.epsilon * cfg_.epsilon, 0.4); }

  double objective(const Plane& f) const {
    const Plane kf = filter(f, k_, false);
    double e = 0.0;
    for (int y = 0; y < ih_; ++y)
      for (int x = 0; x < iw_; ++x) e += std::pow(kf(x, y) - y_(x, y), 2);
    double reg = 0.0;
    for (double g : diff_x(f).values()) reg += rho(g);
    for (double g : diff_y(f).values()) reg += rho(g);
    return e + cfg_.reg_weight * reg;
  }

  // Half-derivative of rho with respect to g^2, the weight of the quadratic
  // majorizer at the current gradients.
  void reweight(const Plane& f) {
    wx_ = diff_x(f);
    wy_ = diff_y(f);
    const double e2 = cfg_.epsilon * cfg_.epsilon;
    for (double& g : wx_.values()) g = 0.4 * std::pow(g * g + e2, -0.6);
    for (double& g : wy_.values()) g = 0.4 * std::pow(g * g + e2, -0.6);
  }

  void mask(Plane& p) const {
    for (int y = 0; y < p.height(); ++y)
      for (int x = 0; x < p.width(); ++x)
        if (x >= iw_ || y >= ih_) p(x, y) = 0.0;
  }

  Plane apply(const Plane& f) const {
    Plane kf = filter(f, k_, false);
    mask(kf);
    Plane out = filter(kf, k_, true);
    Plane gx = diff_x(f);
    Plane gy = diff_y(f);
    auto gxv = gx.values();
    auto gyv = gy.values();
    auto wxv = wx_.values();
    auto wyv = wy_.values();
    for (std::size_t i = 0; i < gxv.size(); ++i) {
      gxv[i] *= wxv[i];
      gyv[i] *= wyv[i];
    }
    axpy(cfg_.reg_weight, diff_x_t(gx), out);
    axpy(cfg_.reg_weight, diff_y_t(gy), out);
    return out;
  }

  Plane rhs() const {
    Plane my = y_;
    mask(my);
    return filter(my, k_, true);
  }

  // Conjugate gradients warm-started at f. Returns whether the residual fell
  // below the tolerance.
  bool solve(Plane& f, const Plane& b) const {
    Plane r = b;
    axpy(-1.0, apply(f), r);
    Plane p = r;
    double rr = dot(r, r);
    const double target = cfg_.cg_tolerance * cfg_.cg_tolerance * std::max(dot(b, b), 1e-300);
    for (int it = 0; it < cfg_.cg_iters; ++it) {
      if (rr <= target) return true;
      const Plane ap = apply(p);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) return false;
      const double alpha = rr / pap;
      axpy(alpha, p, f);
      axpy(-alpha, ap, r);
      const double rr_next = dot(r, r);
      const double beta = rr_next / rr;
      rr = rr_next;
      auto pv = p.values();
      auto rv = r.values();
      for (std::size_t i = 0; i < pv.size(); ++i) pv[i] = rv[i] + beta * pv[i];
    }
    return rr <= target;
  }

 private:
  const DeconvConfig& cfg_;
  int iw_;
  int ih_;
  Plane y_;
  Spectrum k_;
  Plane wx_;
  Plane wy_;
};

}  // namespace

Plane wiener_restore(const Plane& img, const Psf& psf, const NsrMatrix& c) {
  check_canvas(img, psf, c);
  const int cw = c.width();
  const int ch = c.height();
  const Spectrum f = dft(smooth_pad(img, cw, ch), cw, ch);
  return idft(wiener_deblur(f, kernel_spectrum(psf, cw, ch), c), img.width(), img.height());
}

void DeconvConfig::validate() const {
  if (!(reg_weight > 0.0)) throw ConfigError("reg_weight must be positive");
  if (irls_iters < 1 || cg_iters < 1) throw ConfigError("iteration counts must be >= 1");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(cg_tolerance > 0.0)) throw ConfigError("cg_tolerance must be positive");
}

DeconvResult sparse_deconvolve(const Plane& img, const Psf& psf, const DeconvConfig& cfg, const NsrMatrix& c) {
  cfg.validate();
  check_canvas(img, psf, c);
  SparseProblem problem(img, psf, cfg, c.width(), c.height());
  Plane f = idft(wiener_deblur(dft(problem.data(), c.width(), c.height()), problem.kernel(), c));
  const Plane b = problem.rhs();

  DeconvResult out;
  out.objective.push_back(problem.objective(f));
  for (int it = 0; it < cfg.irls_iters; ++it) {
    problem.reweight(f);
    if (!problem.solve(f, b)) out.converged = false;
    out.objective.push_back(problem.objective(f));
  }
  out.restored = crop(f, 0, 0, img.width(), img.height());
  return out;
}

DeconvResult deconvolve(const Plane& img, const Psf& psf, const DeconvConfig& cfg, const NsrMatrix& c) {
  if (cfg.method == DeconvMethod::sparse) return sparse_deconvolve(img, psf, cfg, c);
  cfg.validate();
  DeconvResult out;
  out.restored = wiener_restore(img, psf, c);
  return out;
}

Image deblur(const Image& img, const Psf& psf, const DeconvConfig& cfg, const NsrMatrix& c) {
  return deconvolve(img.plane(), psf, cfg, c).image();
}

namespace {

// Box average of a 0/1 mask over a (2r+1)^2 window clipped to the image.
Plane feather(const Grid<int>& labels, int label, int r) {
  const int w = labels.width();
  const int h = labels.height();
  Plane out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int hits = 0;
      int count = 0;
      for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy)
        for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) {
          ++count;
          hits += labels(xx, yy) == label;
        }
      out(x, y) = static_cast<double>(hits) / count;
    }
  return out;
}

}  // namespace

Image deblur_with_depthmap(const Image& img, const DepthMap& map, const KernelBank& bank, const DeconvConfig& cfg) {
  if (map.labels.width() != img.width() || map.labels.height() != img.height())
    throw DimensionError("depth map and image sizes differ");
  std::set<int> present;
  for (int v : map.labels.values()) {
    if (v < 0 || static_cast<std::size_t>(v) >= map.legend.size()) throw LegendError("label outside the legend");
    present.insert(v);
  }
  const std::vector<int> labels(present.begin(), present.end());
  for (int label : labels) bank.index_of(map.legend[static_cast<std::size_t>(label)]);

  const NsrMatrix c = canvas_nsr(img.width(), img.height(), bank.max_side(), cfg.reg_weight);
  std::vector<Plane> restored(labels.size());
  parallel_for(labels.size(), [&](std::size_t i) {
    const Psf& psf = bank.at_scale(map.legend[static_cast<std::size_t>(labels[i])]);
    restored[i] = deconvolve(img.plane(), psf, cfg, c).restored;
  });
  if (labels.size() == 1) return Image(restored[0]);

  Plane out(img.width(), img.height());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Plane wgt = feather(map.labels, labels[i], kFeatherRadius);
    auto o = out.values();
    auto r = restored[i].values();
    auto wv = wgt.values();
    for (std::size_t j = 0; j < o.size(); ++j) o[j] += wv[j] * r[j];
  }
  return Image(std::move(out));
}

}  // namespace apf
