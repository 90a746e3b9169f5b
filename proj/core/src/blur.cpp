#include "aperture_forge/blur.hpp"

#include <algorithm>

namespace apf {

Plane convolve_replicate(const Plane& values, const Psf& psf) {
  const int w = values.width();
  const int h = values.height();
  Plane out(w, h);
  const Plane& k = psf.kernel();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int j = 0; j < k.height(); ++j) {
        const int sy = std::clamp(y - (j - psf.center_y()), 0, h - 1);
        for (int i = 0; i < k.width(); ++i) {
          const int sx = std::clamp(x - (i - psf.center_x()), 0, w - 1);
          acc += k(i, j) * values(sx, sy);
        }
      }
      out(x, y) = acc;
    }
  return out;
}

Image blur(const Image& image, const Psf& psf, double sigma, Rng& rng) {
  if (psf.width() > image.width() || psf.height() > image.height()) {
    throw DimensionError("blur: PSF larger than the image");
  }
  if (!(sigma >= 0.0)) throw DomainError("blur: noise sigma must be non-negative");
  Plane out = convolve_replicate(image.plane(), psf);
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : out.values()) v += noise(rng);
  }
  return Image(std::move(out));
}

Image blur(const Image& image, const Psf& psf, double sigma, std::uint64_t seed) {
  Rng rng(seed);
  return blur(image, psf, sigma, rng);
}

}  // namespace apf
