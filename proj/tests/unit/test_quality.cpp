#include <gtest/gtest.h>

#include <cmath>

#include "aperture_forge/blur.hpp"
#include "aperture_forge/deconv.hpp"
#include "aperture_forge/quality.hpp"
#include "support.hpp"

namespace apf {
namespace {

using testing::corpus;

Plane step_edge(int w, int h) {
  Plane p(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = w / 2; x < w; ++x) p(x, y) = 1.0;
  return p;
}

Plane blurred_plane(const Image& img, const AperturePattern& p, int s, double sigma = 0.0) {
  return blur(img, psf_from_pattern(p, BlurScale(s)), sigma, std::uint64_t{5}).plane();
}

TEST(NormSparsity, Examples) {
  EXPECT_EQ(norm_sparsity(Plane(8, 8, 0.3)), 0.0);
  Plane one(2, 2);
  one(1, 1) = 0.5;
  // Two equal non-zero differences: 2 / sqrt(2).
  EXPECT_NEAR(norm_sparsity(one), std::sqrt(2.0), 1e-12);
  Plane row(3, 2);
  row(2, 0) = row(2, 1) = 1.0;
  // A vertical step: one unit difference per row.
  EXPECT_NEAR(norm_sparsity(row), std::sqrt(2.0), 1e-12);
  EXPECT_THROW(norm_sparsity(Plane(1, 5)), DimensionError);
}

TEST(NormSparsity, BlurSpreadsGradients) {
  const Image& img = corpus()[0];
  EXPECT_GT(norm_sparsity(blurred_plane(img, testing::selected_pattern(), 5)), norm_sparsity(img));
}

TEST(NormSparsity, ScaleInvariant) {
  const Plane a = corpus()[3].plane();
  Plane b = a;
  for (double& v : b.values()) v *= 0.5;
  EXPECT_NEAR(norm_sparsity(a), norm_sparsity(b), 1e-12);
}

TEST(SparsityPrior, Examples) {
  EXPECT_EQ(sparsity_prior(Plane(8, 8, 0.7)), 0.0);
  EXPECT_NEAR(sparsity_prior(step_edge(10, 6)), 6.0, 1e-12);
  EXPECT_NEAR(sparsity_density(step_edge(10, 6)), 6.0 / 60.0, 1e-12);
}

TEST(SparsityPrior, WrongKernelScoresWorse) {
  const Image& img = corpus()[0];
  const AperturePattern& p = testing::selected_pattern();
  const Psf truth = psf_from_pattern(p, BlurScale(4));
  const Image b = blur(img, truth, 0.001, std::uint64_t{3});
  const NsrMatrix c = canvas_nsr(64, 64, 8, kDefaultNsrWeight);
  const double right = sparsity_prior(wiener_restore(b.plane(), truth, c));
  const double wrong = sparsity_prior(wiener_restore(b.plane(), psf_from_pattern(p, BlurScale(8)), c));
  EXPECT_LT(right, wrong);
}

TEST(Sharpness, GaussianTail) {
  EXPECT_NEAR(neg_log10_gaussian_tail(0.0), std::log10(2.0), 1e-12);
  EXPECT_NEAR(neg_log10_gaussian_tail(3.0), -std::log10(0.5 * std::erfc(3.0 / std::sqrt(2.0))), 1e-10);
  // Deep tail: -log10 Q(x) ~ x^2 / (2 ln 10) + log10(x sqrt(2 pi)).
  const double x = 40.0;
  EXPECT_NEAR(neg_log10_gaussian_tail(x), x * x / (2 * std::log(10.0)) + std::log10(x * std::sqrt(2 * M_PI)), 1e-3);
  double prev = -1.0;
  for (double t = -5; t < 60; t += 0.5) {
    const double v = neg_log10_gaussian_tail(t);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Sharpness, FromMoments) {
  EXPECT_NEAR(sharpness_from_moments(5.0, 5.0, 1.0, 300.0), 0.30103, 1e-5);
  EXPECT_EQ(sharpness_from_moments(5.0, 5.0, 0.0, 300.0), 0.0);
  EXPECT_EQ(sharpness_from_moments(0.0, 1000.0, 1.0, 300.0), 300.0);
  EXPECT_NEAR(sharpness_from_moments(10.0, 5.0, 1.0, 300.0), 0.0, 1e-6);
}

TEST(Sharpness, NaturalPatchBeatsNoise) {
  SharpnessOptions opts;
  opts.clamp_max = 1e9;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const double noise = sharpness_index(testing::random_image(64, 64, seed), opts);
    const double natural = sharpness_index(corpus()[seed], opts);
    EXPECT_LT(noise, natural) << seed;
    EXPECT_LT(noise, 5.0);
  }
}

TEST(Sharpness, BlurLowersIndex) {
  SharpnessOptions opts;
  opts.clamp_max = 1e9;
  for (std::size_t i : {0u, 4u, 8u}) {
    const Image& img = corpus()[i];
    EXPECT_GT(sharpness_index(img, opts),
              sharpness_index(blurred_plane(img, patterns::open_circular(), 7), opts));
  }
}

TEST(Sharpness, DeterministicAndValidated) {
  const Image& img = corpus()[2];
  EXPECT_EQ(sharpness_index(img), sharpness_index(img));
  SharpnessOptions bad;
  bad.surrogates = 1;
  EXPECT_THROW(sharpness_index(img, bad), ConfigError);
  EXPECT_THROW(sharpness_index(Plane(7, 16, 0.5)), DimensionError);
}

TEST(Sharpness, PeriodicComponentRemovesBorderJump) {
  Plane ramp(32, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) ramp(x, y) = x / 31.0;
  const Plane p = periodic_component(ramp);
  EXPECT_LT(periodic_tv(p), 0.5 * periodic_tv(ramp));
  double mean_in = 0.0;
  double mean_out = 0.0;
  for (double v : ramp.values()) mean_in += v;
  for (double v : p.values()) mean_out += v;
  EXPECT_NEAR(mean_in, mean_out, 1e-9);
}

TEST(PyramidRing, IdenticalImagesHaveNoRinging) {
  const Plane b = blurred_plane(corpus()[1], testing::selected_pattern(), 5);
  EXPECT_EQ(pyramid_ring(b, b), 0.0);
}

TEST(PyramidRing, AddedOscillationCounts) {
  const Plane b = blurred_plane(corpus()[1], testing::selected_pattern(), 5);
  Plane d = b;
  for (int y = 0; y < d.height(); ++y)
    for (int x = 0; x < d.width(); ++x) d(x, y) += ((x + y) % 2 ? 0.2 : -0.2);
  EXPECT_GT(pyramid_ring(b, d), 0.0);
  EXPECT_THROW(pyramid_ring(b, Plane(32, 32)), DimensionError);
  RingOptions bad;
  bad.levels = 0;
  EXPECT_THROW(pyramid_ring(b, d, bad), ConfigError);
}

TEST(PyramidRing, OversizedKernelRingsMore) {
  const Image& img = corpus()[0];
  const AperturePattern& p = patterns::open_circular();
  const Image b = blur(img, psf_from_pattern(p, BlurScale(5)), 0.001, std::uint64_t{7});
  const NsrMatrix c = canvas_nsr(64, 64, 11, kDefaultNsrWeight);
  const double right = pyramid_ring(b.plane(), wiener_restore(b.plane(), psf_from_pattern(p, BlurScale(5)), c));
  const double over = pyramid_ring(b.plane(), wiener_restore(b.plane(), psf_from_pattern(p, BlurScale(11)), c));
  EXPECT_LT(right, over);
}

TEST(Aggregate, Weights) {
  EXPECT_NEAR(QualityReport::combine(0.1, 100.0, 10.0, 0.0), 3.145, 1e-12);
  EXPECT_EQ(QualityReport::combine(0, 0, 0, 0), 0.0);
  EXPECT_NEAR(QualityReport::combine(1, 0, 0, 0), -12.65, 1e-15);
  EXPECT_NEAR(QualityReport::combine(0, 0, 0, 1), -9.86, 1e-15);
}

TEST(Aggregate, ReportIsConsistent) {
  const Plane b = blurred_plane(corpus()[5], testing::selected_pattern(), 4, 0.001);
  const Plane d = wiener_restore(b, psf_from_pattern(testing::selected_pattern(), BlurScale(4)),
                                 canvas_nsr(64, 64, 4, kDefaultNsrWeight));
  const QualityReport r = aggregate_quality(b, d);
  EXPECT_EQ(r.norm_sparsity, norm_sparsity(d));
  EXPECT_EQ(r.sparsity_prior, sparsity_density(d));
  EXPECT_EQ(r.sharpness_index, sharpness_index(d));
  EXPECT_EQ(r.pyramid_ring, pyramid_ring(b, d));
  EXPECT_DOUBLE_EQ(r.aggregate, QualityReport::combine(r.norm_sparsity, r.sharpness_index, r.sparsity_prior,
                                                       r.pyramid_ring));
  EXPECT_EQ(aggregate_quality(b, d).aggregate, r.aggregate);
}

TEST(Aggregate, PicksTrueDiskSize) {
  // Open circular aperture at side 7 against sides 3, 5, 9 and 11.
  const AperturePattern& p = patterns::open_circular();
  int hits = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    const Image b = blur(corpus()[i], psf_from_pattern(p, BlurScale(7)), 0.001, std::uint64_t{100 + i});
    const NsrMatrix c = canvas_nsr(64, 64, 11, kDefaultNsrWeight);
    int best = 0;
    double best_q = -1e300;
    for (int s : {3, 5, 7, 9, 11}) {
      const double q = aggregate_quality(b.plane(), wiener_restore(b.plane(), psf_from_pattern(p, BlurScale(s)), c))
                           .aggregate;
      if (q > best_q) {
        best_q = q;
        best = s;
      }
    }
    hits += best == 7;
  }
  EXPECT_GE(hits, 8);
}

}  // namespace
}  // namespace apf
