#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "aperture_forge/error.hpp"

namespace apf {

// Dense row-major 2D array. Index (x, y) with x the column.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw DimensionError("negative grid dimension");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Plane = Grid<double>;
using ComplexPlane = Grid<std::complex<double>>;

// Sub-rectangle copy; throws DimensionError when the window leaves the grid.
template <typename T>
Grid<T> crop(const Grid<T>& g, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || w < 0 || h < 0 || x0 + w > g.width() || y0 + h > g.height()) {
    throw DimensionError("crop window outside grid");
  }
  Grid<T> out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out(x, y) = g(x0 + x, y0 + y);
  return out;
}

// 180 degree rotation.
template <typename T>
Grid<T> rotate180(const Grid<T>& g) {
  Grid<T> out(g.width(), g.height());
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) out(g.width() - 1 - x, g.height() - 1 - y) = g(x, y);
  return out;
}

}  // namespace apf
