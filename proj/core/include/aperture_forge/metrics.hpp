#pragma once

#include <vector>

#include "aperture_forge/fft.hpp"
#include "aperture_forge/pattern.hpp"
#include "aperture_forge/prior.hpp"
#include "aperture_forge/psf.hpp"
#include "aperture_forge/radiometry.hpp"

namespace apf {

// Side of the working spectrum used for pattern evaluation.
inline constexpr int kMetricSize = 64;

// Per-bin noise-to-signal ratio |C|^2.
struct NsrMatrix {
  Plane c_sq;
  int width() const { return c_sq.width(); }
  int height() const { return c_sq.height(); }
};

// (sigma_r^2 + nJ) / ((nJ)^2 A_1) for a prior with unit mean.
NsrMatrix nsr(const ImagingConfig& cfg, int open_holes, const NaturalImagePrior& prior_a1);

// weight * (|G_x|^2 + |G_y|^2) with G the forward-difference spectra: an
// intensity-domain NSR for a 1/f^2 image spectrum.
NsrMatrix gradient_nsr(int w, int h, double weight);

NsrMatrix constant_nsr(int w, int h, double value);

// conj(K) F / (|K|^2 + |C|^2) per bin.
Spectrum wiener_deblur(const Spectrum& f_spec, const Spectrum& k_spec, const NsrMatrix& c);

// R_n / n^2 with R_n = sum (sigma_r^2 + nJ) / (|K|^2 + |C|^2).
double deblur_error_R(const Spectrum& k, const ImagingConfig& cfg, int open_holes,
                      const NaturalImagePrior& prior_a1);

// D_n / n^2 with D_n = sum (nJ)^2 A_1 |K2|^2 / (|K2|^2 + |C|^2)^2 |K2 - K1|^2.
// Expected extra error when an image blurred by K1 is deblurred with K2.
double kernel_distance_D(const Spectrum& k2, const Spectrum& k1, const ImagingConfig& cfg, int open_holes,
                         const NaturalImagePrior& prior_a1);

struct ScaleSet {
  std::vector<int> scales;

  // 1..10.
  static ScaleSet standard();
  static ScaleSet range(int lo, int hi);
  // Throws when empty, non-positive or repeated.
  void validate() const;
};

struct PatternScores {
  double r_max = 0.0;
  double d_min = 0.0;
  double d_r_min = 0.0;

  bool operator==(const PatternScores&) const = default;
};

// Precomputed noise terms for one throughput; evaluates R and D without
// rebuilding |C|^2 for every kernel.
class MetricContext {
 public:
  MetricContext(const ImagingConfig& cfg, int open_holes, const NaturalImagePrior& prior_a1);

  double deblur_error(const Spectrum& k) const;
  double kernel_distance(const Spectrum& k2, const Spectrum& k1) const;

  int width() const { return c_sq_.width(); }
  int height() const { return c_sq_.height(); }
  const Plane& c_sq() const { return c_sq_; }

 private:
  void check(const Spectrum& k) const;

  int n_;
  double sigma_sq_;
  double gain_sq_;  // (nJ)^2
  Plane a1_;
  Plane c_sq_;
};

// Worst case over the scale set: max R, min D over ordered pairs of distinct
// scales, min flip distance D(K_s, rot180 K_s). The delta kernel equals its
// own flip, so |s| = 1 is left out of the flip minimum.
PatternScores score_pattern(const AperturePattern& p, const ScaleSet& scales, const ImagingConfig& cfg,
                            const NaturalImagePrior& prior_a1);

}  // namespace apf
