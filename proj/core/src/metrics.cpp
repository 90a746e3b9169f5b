#include "aperture_forge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace apf {

namespace {

void require_same(const ComplexPlane& a, const ComplexPlane& b, const char* what) {
  if (!a.same_shape(b)) throw DimensionError(std::string(what) + ": spectrum size mismatch");
}

}  // namespace

NsrMatrix nsr(const ImagingConfig& cfg, int open_holes, const NaturalImagePrior& prior_a1) {
  const double j = photons_per_hole(cfg);
  const double sigma_sq = noise_variance(cfg, open_holes);
  const double gain = open_holes * j;
  NsrMatrix out{Plane(prior_a1.width(), prior_a1.height())};
  auto a = prior_a1.a.values();
  auto c = out.c_sq.values();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = sigma_sq / (gain * gain * a[i]);
  return out;
}

NsrMatrix gradient_nsr(int w, int h, double weight) {
  if (w < 1 || h < 1) throw DimensionError("gradient_nsr: empty size");
  if (!(weight >= 0.0)) throw DomainError("gradient_nsr: weight must be non-negative");
  NsrMatrix out{Plane(w, h)};
  for (int y = 0; y < h; ++y) {
    const double sy = std::sin(std::numbers::pi * y / h);
    for (int x = 0; x < w; ++x) {
      const double sx = std::sin(std::numbers::pi * x / w);
      // |1 - e^{-i theta}|^2 = 4 sin^2(theta / 2)
      out.c_sq(x, y) = weight * 4.0 * (sx * sx + sy * sy);
    }
  }
  return out;
}

NsrMatrix constant_nsr(int w, int h, double value) {
  if (!(value >= 0.0)) throw DomainError("constant_nsr: value must be non-negative");
  return NsrMatrix{Plane(w, h, value)};
}

Spectrum wiener_deblur(const Spectrum& f_spec, const Spectrum& k_spec, const NsrMatrix& c) {
  require_same(f_spec, k_spec, "wiener_deblur");
  if (!f_spec.same_shape(c.c_sq)) throw DimensionError("wiener_deblur: NSR size mismatch");
  Spectrum out(f_spec.width(), f_spec.height());
  auto f = f_spec.values();
  auto k = k_spec.values();
  auto cs = c.c_sq.values();
  auto o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double den = std::norm(k[i]) + cs[i];
    o[i] = den > 0.0 ? std::conj(k[i]) * f[i] / den : std::complex<double>{};
  }
  return out;
}

MetricContext::MetricContext(const ImagingConfig& cfg, int open_holes, const NaturalImagePrior& prior_a1)
    : n_(open_holes),
      sigma_sq_(noise_variance(cfg, open_holes)),
      gain_sq_(std::pow(open_holes * photons_per_hole(cfg), 2)),
      a1_(prior_a1.a),
      c_sq_(nsr(cfg, open_holes, prior_a1).c_sq) {}

void MetricContext::check(const Spectrum& k) const {
  if (!k.same_shape(c_sq_)) throw DimensionError("kernel spectrum does not match the prior size");
}

double MetricContext::deblur_error(const Spectrum& k) const {
  check(k);
  auto kv = k.values();
  auto c = c_sq_.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < kv.size(); ++i) sum += sigma_sq_ / (std::norm(kv[i]) + c[i]);
  return sum / (static_cast<double>(n_) * n_);
}

double MetricContext::kernel_distance(const Spectrum& k2, const Spectrum& k1) const {
  check(k2);
  require_same(k2, k1, "kernel_distance_D");
  auto a = k2.values();
  auto b = k1.values();
  auto c = c_sq_.values();
  auto prior = a1_.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double mag = std::norm(a[i]);
    const double den = mag + c[i];
    sum += gain_sq_ * prior[i] * mag / (den * den) * std::norm(a[i] - b[i]);
  }
  return sum / (static_cast<double>(n_) * n_);
}

double deblur_error_R(const Spectrum& k, const ImagingConfig& cfg, int open_holes,
                      const NaturalImagePrior& prior_a1) {
  return MetricContext(cfg, open_holes, prior_a1).deblur_error(k);
}

double kernel_distance_D(const Spectrum& k2, const Spectrum& k1, const ImagingConfig& cfg, int open_holes,
                         const NaturalImagePrior& prior_a1) {
  return MetricContext(cfg, open_holes, prior_a1).kernel_distance(k2, k1);
}

ScaleSet ScaleSet::standard() { return range(1, 10); }

ScaleSet ScaleSet::range(int lo, int hi) {
  ScaleSet out;
  for (int s = lo; s <= hi; ++s) out.scales.push_back(s);
  out.validate();
  return out;
}

void ScaleSet::validate() const {
  if (scales.empty()) throw EmptyInputError("empty scale set");
  std::set<int> seen;
  for (int s : scales) {
    if (s < 1) throw DomainError("scale set entries must be >= 1");
    if (!seen.insert(s).second) throw DomainError("scale set has a repeated entry");
  }
}

PatternScores score_pattern(const AperturePattern& p, const ScaleSet& scales, const ImagingConfig& cfg,
                            const NaturalImagePrior& prior_a1) {
  scales.validate();
  const MetricContext ctx(cfg, p.open_count(), prior_a1);
  const int w = ctx.width();
  const int h = ctx.height();

  std::vector<int> sorted = scales.scales;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Spectrum> spectra;
  spectra.reserve(sorted.size());
  for (int s : sorted) spectra.push_back(kernel_spectrum(psf_from_pattern(p, BlurScale(s)), w, h));

  PatternScores out;
  out.d_min = std::numeric_limits<double>::infinity();
  out.d_r_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out.r_max = std::max(out.r_max, ctx.deblur_error(spectra[i]));
    for (std::size_t j = 0; j < sorted.size(); ++j)
      if (i != j) out.d_min = std::min(out.d_min, ctx.kernel_distance(spectra[i], spectra[j]));
    if (sorted[i] >= 2) {
      const Spectrum flipped = kernel_spectrum(psf_from_pattern(p, BlurScale(-sorted[i])), w, h);
      out.d_r_min = std::min(out.d_r_min, ctx.kernel_distance(spectra[i], flipped));
    }
  }
  if (sorted.size() < 2) out.d_min = 0.0;
  if (sorted.back() < 2) out.d_r_min = 0.0;
  return out;
}

}  // namespace apf
