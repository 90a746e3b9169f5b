#pragma once

#include <cstdint>

#include "aperture_forge/grid.hpp"
#include "aperture_forge/image.hpp"

namespace apf {

// l1 / l2 of the forward-difference gradients; 0 for a flat image.
double norm_sparsity(const Plane& img);
double norm_sparsity(const Image& img);

// Sum over pixels of |dx|^0.8 + |dy|^0.8 (forward differences).
double sparsity_prior(const Plane& img);
double sparsity_prior(const Image& img);

// sparsity_prior() divided by the pixel count, the form used in the aggregate
// so that its weight does not depend on the window size.
double sparsity_density(const Plane& img);

// Periodic total variation: sum of |forward differences| with wrap-around.
double periodic_tv(const Plane& img);

// Periodic component of Moisan's periodic + smooth decomposition; removes the
// cross-shaped spectral artifact of the image borders.
Plane periodic_component(const Plane& img);

// -log10 of the upper Gaussian tail at x, accurate deep into the tail.
double neg_log10_gaussian_tail(double x);

struct SharpnessOptions {
  int surrogates = 30;
  std::uint64_t seed = 0x51a9e55;
  double clamp_max = 300.0;
  bool periodic = true;

  void validate() const;
};

// -log10 Phi((mu - tv) / sigma) clamped to [0, clamp_max]; 0 when sigma = 0.
double sharpness_from_moments(double tv, double mu, double sigma, double clamp_max);

// mu and sigma are the mean and sample deviation of the TV of random-phase
// surrogates (same Fourier modulus, phases of white noise).
double sharpness_index(const Plane& img, const SharpnessOptions& opts = {});
double sharpness_index(const Image& img, const SharpnessOptions& opts = {});

struct RingOptions {
  int levels = 3;
  double alpha = 1.5;

  void validate() const;
};

// Sum over dyadic levels of the mean positive excess of the deblurred
// gradient magnitude over alpha times the blurred gradient magnitude,
// the latter max-filtered over 3x3 so that sharpened edges are not counted.
double pyramid_ring(const Plane& blurred, const Plane& deblurred, const RingOptions& opts = {});
double pyramid_ring(const Image& blurred, const Image& deblurred, const RingOptions& opts = {});

struct QualityWeights {
  static constexpr double kNormSparsity = -12.65;
  static constexpr double kSharpness = 0.073;
  static constexpr double kSparsity = -0.289;
  static constexpr double kRing = -9.86;
};

struct QualityReport {
  double norm_sparsity = 0.0;
  double sparsity_prior = 0.0;  // per pixel, see sparsity_density()
  double sharpness_index = 0.0;
  double pyramid_ring = 0.0;
  double aggregate = 0.0;

  static double combine(double norm_sparsity, double sharpness_index, double sparsity_prior, double pyramid_ring);
};

struct QualityOptions {
  SharpnessOptions sharpness;
  RingOptions ring;
};

// Higher aggregate means better quality.
QualityReport aggregate_quality(const Plane& blurred, const Plane& deblurred, const QualityOptions& opts = {});
QualityReport aggregate_quality(const Image& blurred, const Image& deblurred, const QualityOptions& opts = {});

}  // namespace apf
