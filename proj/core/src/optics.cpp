#include "aperture_forge/optics.hpp"

#include <cmath>

#include "aperture_forge/error.hpp"

namespace apf {

void ThinLensConfig::validate() const {
  if (!(focal_length_mm > 0.0)) throw ConfigError("focal length must be positive");
  if (!(focus_distance_mm > focal_length_mm)) throw ConfigError("focus distance must exceed the focal length");
  if (!(aperture_diameter_mm > 0.0)) throw ConfigError("aperture diameter must be positive");
  if (!(pixel_pitch_um > 0.0)) throw ConfigError("pixel pitch must be positive");
}

BlurSize blur_size(const ThinLensConfig& lens, double object_distance_mm) {
  lens.validate();
  const double f = lens.focal_length_mm;
  if (!(object_distance_mm > f)) throw DomainError("object distance must exceed the focal length");
  const double v0 = f * lens.focus_distance_mm / (lens.focus_distance_mm - f);
  const double v = f * object_distance_mm / (object_distance_mm - f);
  const double blur_mm = lens.aperture_diameter_mm * (v - v0) / v0;
  BlurSize out;
  out.diameter_px = std::abs(blur_mm) / (lens.pixel_pitch_um * 1e-3);
  out.side = (v > v0) - (v < v0);
  return out;
}

}  // namespace apf
