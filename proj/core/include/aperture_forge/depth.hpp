#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "aperture_forge/image.hpp"
#include "aperture_forge/metrics.hpp"
#include "aperture_forge/pattern.hpp"
#include "aperture_forge/psf.hpp"
#include "aperture_forge/quality.hpp"

namespace apf {

// PSFs keyed by signed scale, kept in ascending scale order. Label indices
// throughout the depth module refer to this order.
class KernelBank {
 public:
  explicit KernelBank(std::map<int, Psf> entries);

  static KernelBank from_pattern(const AperturePattern& pattern, const std::vector<int>& scales);
  static KernelBank from_directory(const std::filesystem::path& dir);

  std::size_t size() const { return scales_.size(); }
  const std::vector<int>& scales() const { return scales_; }
  const Psf& at_index(std::size_t k) const { return psfs_.at(k); }
  const Psf& at_scale(int s) const;
  // Throws LegendError when s is not in the bank.
  std::size_t index_of(int s) const;
  bool contains(int s) const;
  int max_side() const;

 private:
  std::vector<int> scales_;
  std::vector<Psf> psfs_;
};

// Parses "a:b" (inclusive, 0 skipped) or a comma list such as "-3,1,2".
std::vector<int> parse_scale_list(const std::string& text);

// Orders scales for tie-breaking: smaller |s| first, then positive.
bool milder_scale(int a, int b);

struct ScaleEstimate {
  int scale = 1;
  double probability = 1.0;
};

struct EstimateOptions {
  QualityOptions quality;
  // Pixels dropped on each side of the deblurred patch before scoring.
  int margin = 0;
};

inline constexpr double kEstimationNsrWeight = 2e-3;

// gradient_nsr() on the canvas used for w x h patches and this bank.
NsrMatrix estimation_nsr(int w, int h, const KernelBank& bank, double weight = kEstimationNsrWeight);

// Aggregate quality of the patch deblurred by every bank kernel, in bank order.
std::vector<double> kernel_qualities(const Plane& patch, const KernelBank& bank, const NsrMatrix& c,
                                     const EstimateOptions& opts = {});

// The two best scales, probabilities from a softmax over the top two with
// temperature max(IQR of all qualities, 1e-6).
std::vector<ScaleEstimate> estimate_patch_scale(const Image& patch, const KernelBank& bank, const NsrMatrix& c,
                                                const EstimateOptions& opts = {});
std::vector<ScaleEstimate> estimate_from_qualities(const std::vector<double>& qualities, const KernelBank& bank);

// Per-pixel probabilities over the bank; at most two non-zero per pixel.
struct DepthVolume {
  int width = 0;
  int height = 0;
  std::vector<int> legend;
  std::vector<double> probs;  // (y * width + x) * legend.size() + k

  DepthVolume() = default;
  DepthVolume(int w, int h, std::vector<int> legend);
  std::size_t labels() const { return legend.size(); }
  double& at(int x, int y, std::size_t k) { return probs[(static_cast<std::size_t>(y) * width + x) * labels() + k]; }
  double at(int x, int y, std::size_t k) const {
    return probs[(static_cast<std::size_t>(y) * width + x) * labels() + k];
  }
};

struct WindowGrid {
  std::vector<int> xs;  // window origins
  std::vector<int> ys;
};
WindowGrid window_grid(int width, int height, int patch, int stride);

DepthVolume raw_depth_volume(const Image& img, const KernelBank& bank, const NsrMatrix& c, int patch, int stride,
                             const EstimateOptions& opts = {});

struct MrfParams {
  double lambda0 = 1000.0;
  double sigma_lambda = 0.006;
  double gauss_std = 0.1;
  double prob_floor = 1e-6;

  void validate() const;
};

// Per-pixel label costs.
struct DataTerm {
  int width = 0;
  int height = 0;
  std::vector<int> legend;
  std::vector<double> cost;

  DataTerm() = default;
  DataTerm(int w, int h, std::vector<int> legend);
  std::size_t labels() const { return legend.size(); }
  double& at(int x, int y, std::size_t k) { return cost[(static_cast<std::size_t>(y) * width + x) * labels() + k]; }
  double at(int x, int y, std::size_t k) const {
    return cost[(static_cast<std::size_t>(y) * width + x) * labels() + k];
  }
};

// -log of the probabilities smoothed along the label axis by a truncated
// Gaussian (std in index units) and floored.
DataTerm data_term(const DepthVolume& volume, const MrfParams& params);

double smoothness_lambda(double g_p, double g_q, const MrfParams& params);

// |index difference|: the pairwise label distance.
inline int label_distance(std::size_t a, std::size_t b) { return a > b ? static_cast<int>(a - b) : static_cast<int>(b - a); }

struct DepthMap {
  Grid<int> labels;
  std::vector<int> legend;

  int scale_at(int x, int y) const { return legend.at(static_cast<std::size_t>(labels(x, y))); }
};

// Sum of data costs plus lambda-weighted label distances over 8-neighbour
// pairs.
double mrf_energy(const DataTerm& data, const Grid<int>& labels, const Image& img, const MrfParams& params);

// Per-pixel minimum cost, ties broken by milder_scale().
Grid<int> argmin_labels(const DataTerm& data);

struct MrfStats {
  double initial_energy = 0.0;
  double final_energy = 0.0;
  int sweeps = 0;
};

inline constexpr int kMaxExpansionSweeps = 10;

// Alpha-expansion from the argmin labelling; every binary move is a min cut.
DepthMap solve_mrf(const DataTerm& data, const Image& img, const MrfParams& params, MrfStats* stats = nullptr);

}  // namespace apf
