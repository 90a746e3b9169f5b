#pragma once

#include <filesystem>

#include "aperture_forge/grid.hpp"

namespace apf {

// Grayscale intensities in [0, 1]. Values are clamped on construction;
// non-finite input is rejected.
class Image {
 public:
  Image(int width, int height, double fill = 0.0);
  explicit Image(Plane values);

  int width() const { return values_.width(); }
  int height() const { return values_.height(); }
  double operator()(int x, int y) const { return values_(x, y); }
  const Plane& plane() const { return values_; }

  bool operator==(const Image&) const = default;

 private:
  Plane values_;
};

// PGM reader accepting P2 and P5 with maxval up to 65535.
Image read_pgm(const std::filesystem::path& path);

// Writes binary P5. bit_depth is 8 or 16.
void write_pgm(const std::filesystem::path& path, const Image& image, int bit_depth = 16);

Image crop(const Image& image, int x0, int y0, int w, int h);

double rmse(const Plane& a, const Plane& b);
inline double rmse(const Image& a, const Image& b) { return rmse(a.plane(), b.plane()); }

}  // namespace apf
