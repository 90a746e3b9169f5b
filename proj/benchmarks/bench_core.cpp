#include <benchmark/benchmark.h>

#include <random>

#include "aperture_forge/blur.hpp"
#include "aperture_forge/deconv.hpp"
#include "aperture_forge/depth.hpp"
#include "aperture_forge/fft.hpp"
#include "aperture_forge/metrics.hpp"
#include "aperture_forge/prior.hpp"
#include "aperture_forge/quality.hpp"

namespace {

using namespace apf;

const AperturePattern& pattern() {
  static const AperturePattern p = read_pattern_file(APF_DATA_DIR "/patterns/selected.txt");
  return p;
}

const Image& patch() {
  static const Image img = read_pgm(APF_DATA_DIR "/patches/patch_12_gravel.pgm");
  return img;
}

void BM_Dft(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Plane p(n, n);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  for (double& v : p.values()) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(dft(p, n, n));
}
BENCHMARK(BM_Dft)->Arg(64)->Arg(96)->Arg(128);

void BM_ScorePattern(benchmark::State& state) {
  const NaturalImagePrior prior = normalized_to_unit_mean(read_prior_file(APF_DATA_DIR "/prior_a1.txt"));
  const ImagingConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(score_pattern(pattern(), ScaleSet::standard(), cfg, prior));
}
BENCHMARK(BM_ScorePattern)->Unit(benchmark::kMillisecond);

void BM_AggregateQuality(benchmark::State& state) {
  const Psf psf = psf_from_pattern(pattern(), BlurScale(5));
  const Image b = blur(patch(), psf, 0.001, std::uint64_t{1});
  const Plane d = wiener_restore(b.plane(), psf, canvas_nsr(64, 64, 5, kDefaultNsrWeight));
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_quality(b.plane(), d));
}
BENCHMARK(BM_AggregateQuality)->Unit(benchmark::kMillisecond);

void BM_EstimatePatchScale(benchmark::State& state) {
  std::vector<int> scales;
  for (int s = -10; s <= 10; ++s)
    if (s != 0) scales.push_back(s);
  const KernelBank bank = KernelBank::from_pattern(pattern(), scales);
  const NsrMatrix c = estimation_nsr(64, 64, bank);
  const Image b = blur(patch(), bank.at_scale(5), 0.001, std::uint64_t{2});
  for (auto _ : state) benchmark::DoNotOptimize(estimate_patch_scale(b, bank, c));
}
BENCHMARK(BM_EstimatePatchScale)->Unit(benchmark::kMillisecond);

void BM_SparseDeconvolve(benchmark::State& state) {
  const Psf psf = psf_from_pattern(pattern(), BlurScale(8));
  const Image b = blur(patch(), psf, 0.005, std::uint64_t{3});
  const DeconvConfig cfg;
  const NsrMatrix c = canvas_nsr(64, 64, 8, cfg.reg_weight);
  for (auto _ : state) benchmark::DoNotOptimize(sparse_deconvolve(b.plane(), psf, cfg, c));
}
BENCHMARK(BM_SparseDeconvolve)->Unit(benchmark::kMillisecond);

void BM_SolveMrf(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<int> legend;
  for (int s = -10; s <= 10; ++s)
    if (s != 0) legend.push_back(s);
  DataTerm data(n, n, legend);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (double& c : data.cost) c = u(rng);
  Plane g(n, n);
  for (double& v : g.values()) v = u(rng) / 10.0;
  const Image img(g);
  MrfParams params;
  params.lambda0 = 5.0;
  params.sigma_lambda = 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(solve_mrf(data, img, params));
}
BENCHMARK(BM_SolveMrf)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
