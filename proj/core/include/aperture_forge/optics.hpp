#pragma once

namespace apf {

// Thin-lens camera. Lengths in millimetres, pixel pitch in micrometres.
struct ThinLensConfig {
  double focal_length_mm = 50.0;
  double focus_distance_mm = 1200.0;
  double aperture_diameter_mm = 20.0;
  double pixel_pitch_um = 5.1;

  void validate() const;
};

struct BlurSize {
  double diameter_px = 0.0;
  // +1 when the image forms behind the sensor (object nearer than the focus
  // distance), -1 in front of it, 0 in focus.
  int side = 0;
};

// |D_a (v - v0) / v0| converted to pixels, with v, v0 from the thin-lens law.
BlurSize blur_size(const ThinLensConfig& lens, double object_distance_mm);

}  // namespace apf
