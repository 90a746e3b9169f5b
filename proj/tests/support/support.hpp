#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aperture_forge/depth.hpp"
#include "aperture_forge/image.hpp"
#include "aperture_forge/pattern.hpp"
#include "aperture_forge/prior.hpp"

namespace apf::testing {

std::filesystem::path data_dir();

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// The bundled 64x64 patches in file-name order.
const std::vector<Image>& corpus();
// data/prior_a1.txt normalized to unit mean.
const NaturalImagePrior& prior_a1();
// data/patterns/selected.txt.
const AperturePattern& selected_pattern();

Image random_image(int w, int h, std::uint64_t seed);
AperturePattern random_pattern(std::uint64_t seed);
// Random pattern equal to its own 180 degree rotation.
AperturePattern random_symmetric_pattern(std::uint64_t seed);

struct EstimationCase {
  int patch = 0;
  int truth = 1;
  int estimate = 1;
};

struct EstimationSetup {
  std::vector<int> bank_scales;
  double sigma = 0.001;
  std::uint64_t seed = 1;
  double nsr_weight = kEstimationNsrWeight;
  EstimateOptions options;
};

// Blurs every corpus patch at every truth scale with `pattern` and runs
// estimate_patch_scale over a bank built from the same pattern.
std::vector<EstimationCase> run_estimation(const AperturePattern& pattern, const std::vector<int>& truths,
                                           const std::vector<std::size_t>& patches, const EstimationSetup& setup);

double mean_abs_error(const std::vector<EstimationCase>& cases);
double mean_sq_error(const std::vector<EstimationCase>& cases);

// Blur at `scale` with noise, deconvolve with the same kernel (sparse solver,
// default settings), RMSE against the sharp patch.
double deblur_rmse(const Image& sharp, const Psf& psf, double sigma, std::uint64_t seed);

}  // namespace apf::testing
