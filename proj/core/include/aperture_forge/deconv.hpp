#pragma once

#include <vector>

#include "aperture_forge/depth.hpp"
#include "aperture_forge/image.hpp"
#include "aperture_forge/metrics.hpp"
#include "aperture_forge/psf.hpp"

namespace apf {

// Weight of gradient_nsr() used when no NSR is given explicitly.
inline constexpr double kDefaultNsrWeight = 2e-3;

// Side of the FFT canvas for an n-pixel extent and a kernel of side k.
int canvas_extent(int n, int kernel_side);

// gradient_nsr() on the canvas that fits `width` x `height` plus the kernel.
NsrMatrix canvas_nsr(int width, int height, int kernel_side, double weight);

// Places `img` at the top-left of a w x h canvas and fills the rest by linear
// interpolation towards the opposite edge, so the canvas is periodic without
// jumps.
Plane smooth_pad(const Plane& img, int w, int h);

// Wiener restoration on the canvas given by c's size; returns the unclamped
// image-sized result.
Plane wiener_restore(const Plane& img, const Psf& psf, const NsrMatrix& c);

enum class DeconvMethod { wiener, sparse };

struct DeconvConfig {
  DeconvMethod method = DeconvMethod::sparse;
  double reg_weight = 2e-3;
  int irls_iters = 8;
  int cg_iters = 50;
  // Smoothing of |g|^0.8 as (g^2 + eps^2)^0.4; keeps the IRLS weights finite.
  double epsilon = 1e-3;
  double cg_tolerance = 1e-6;

  void validate() const;
};

struct DeconvResult {
  Plane restored;  // unclamped
  bool converged = true;
  // Sparse objective after initialization and after every IRLS iteration.
  std::vector<double> objective;

  Image image() const { return Image(restored); }
};

// Minimizes |M(k * f) - img|^2 + reg_weight * sum rho(grad f) on the canvas
// of c, M selecting the image support. rho is the smoothed |.|^0.8.
DeconvResult sparse_deconvolve(const Plane& img, const Psf& psf, const DeconvConfig& cfg, const NsrMatrix& c);

DeconvResult deconvolve(const Plane& img, const Psf& psf, const DeconvConfig& cfg, const NsrMatrix& c);

// Clamped to [0, 1].
Image deblur(const Image& img, const Psf& psf, const DeconvConfig& cfg, const NsrMatrix& c);

inline constexpr int kFeatherRadius = 4;

// Deblurs the whole image once per label present in the map and blends the
// results with box-feathered label masks. Canvas and NSR follow canvas_nsr()
// with the configured reg_weight.
Image deblur_with_depthmap(const Image& img, const DepthMap& map, const KernelBank& bank, const DeconvConfig& cfg);

}  // namespace apf
