#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>

#include "aperture_forge/blur.hpp"
#include "aperture_forge/deconv.hpp"
#include "aperture_forge/parallel.hpp"

#ifndef APF_DATA_DIR
#error "APF_DATA_DIR must point at the bundled data directory"
#endif

namespace apf::testing {

namespace fs = std::filesystem;

fs::path data_dir() { return fs::path(APF_DATA_DIR); }

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("apf_test_" + std::to_string(rd()) + "_" + std::to_string(counter.fetch_add(1)));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

const std::vector<Image>& corpus() {
  static const std::vector<Image> images = [] {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(data_dir() / "patches"))
      if (e.path().extension() == ".pgm") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<Image> out;
    for (const auto& f : files) out.push_back(read_pgm(f));
    return out;
  }();
  return images;
}

const NaturalImagePrior& prior_a1() {
  static const NaturalImagePrior prior = normalized_to_unit_mean(read_prior_file(data_dir() / "prior_a1.txt"));
  return prior;
}

const AperturePattern& selected_pattern() {
  static const AperturePattern p = read_pattern_file(data_dir() / "patterns" / "selected.txt");
  return p;
}

Image random_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Plane p(w, h);
  for (double& v : p.values()) v = u(rng);
  return Image(std::move(p));
}

AperturePattern random_pattern(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uint64_t bits = 0;
  while (bits == 0) bits = rng() & AperturePattern::kAllCells;
  return AperturePattern(bits);
}

AperturePattern random_symmetric_pattern(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uint64_t bits = 0;
  while (bits == 0) {
    const std::uint64_t half = rng() & AperturePattern::kAllCells;
    // Cell i and cell 48 - i are 180 degree images of each other.
    for (int i = 0; i <= AperturePattern::kCells / 2; ++i)
      if ((half >> i) & 1u) bits |= (std::uint64_t{1} << i) | (std::uint64_t{1} << (AperturePattern::kCells - 1 - i));
  }
  return AperturePattern(bits);
}

std::vector<EstimationCase> run_estimation(const AperturePattern& pattern, const std::vector<int>& truths,
                                           const std::vector<std::size_t>& patches, const EstimationSetup& setup) {
  const KernelBank bank = KernelBank::from_pattern(pattern, setup.bank_scales);
  const auto& images = corpus();
  std::vector<EstimationCase> cases;
  for (std::size_t p : patches)
    for (int t : truths) cases.push_back({static_cast<int>(p), t, 0});
  const NsrMatrix c = estimation_nsr(images.at(0).width(), images.at(0).height(), bank, setup.nsr_weight);
  parallel_for(cases.size(), [&](std::size_t i) {
    EstimationCase& ec = cases[i];
    const Psf psf = psf_from_pattern(pattern, BlurScale(ec.truth));
    const Image blurred = blur(images.at(static_cast<std::size_t>(ec.patch)), psf, setup.sigma, setup.seed + 7919 * i);
    ec.estimate = estimate_patch_scale(blurred, bank, c, setup.options).front().scale;
  });
  return cases;
}

double mean_abs_error(const std::vector<EstimationCase>& cases) {
  double s = 0.0;
  for (const auto& c : cases) s += std::abs(c.estimate - c.truth);
  return s / static_cast<double>(cases.size());
}

double mean_sq_error(const std::vector<EstimationCase>& cases) {
  double s = 0.0;
  for (const auto& c : cases) s += std::pow(c.estimate - c.truth, 2);
  return s / static_cast<double>(cases.size());
}

double deblur_rmse(const Image& sharp, const Psf& psf, double sigma, std::uint64_t seed) {
  const Image blurred = blur(sharp, psf, sigma, seed);
  const DeconvConfig cfg;
  const NsrMatrix c = canvas_nsr(sharp.width(), sharp.height(), std::max(psf.width(), psf.height()), cfg.reg_weight);
  return rmse(deblur(blurred, psf, cfg, c), sharp);
}

}  // namespace apf::testing
