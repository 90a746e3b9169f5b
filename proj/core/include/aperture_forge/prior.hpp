#pragma once

#include <filesystem>
#include <span>

#include "aperture_forge/grid.hpp"
#include "aperture_forge/image.hpp"

namespace apf {

// Expected power per frequency bin of natural images, DC at (0, 0).
struct NaturalImagePrior {
  static constexpr double kFloor = 1e-12;
  Plane a;

  int width() const { return a.width(); }
  int height() const { return a.height(); }
};

// Mean over the corpus of |DFT(zero-padded image)|^2, floored at kFloor.
NaturalImagePrior estimate_prior(std::span<const Image> corpus, int pad_w, int pad_h);

// Same shape, rescaled so the mean bin equals one.
NaturalImagePrior normalized_to_unit_mean(const NaturalImagePrior& prior);

// Matrix file (`<h> <w>` header then rows). The reader re-applies the floor.
NaturalImagePrior read_prior_file(const std::filesystem::path& path);
void write_prior_file(const std::filesystem::path& path, const NaturalImagePrior& prior);

}  // namespace apf
