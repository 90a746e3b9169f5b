#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "aperture_forge/blur.hpp"
#include "aperture_forge/fft.hpp"
#include "aperture_forge/optics.hpp"
#include "aperture_forge/pattern.hpp"
#include "aperture_forge/prior.hpp"
#include "aperture_forge/psf.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace apf {
namespace {

using testing::random_image;

double max_abs_diff(const ComplexPlane& a, const ComplexPlane& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

double max_abs_diff(const Plane& a, const Plane& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

// Exact area of target cell (tx, ty) of an a x a grid covered by open cells
// of the 7x7 pattern, both grids spanning the unit square.
Plane area_weights(const AperturePattern& p, int a) {
  auto overlap = [](double lo0, double hi0, double lo1, double hi1) {
    return std::max(0.0, std::min(hi0, hi1) - std::max(lo0, lo1));
  };
  Plane w(a, a);
  for (int ty = 0; ty < a; ++ty)
    for (int tx = 0; tx < a; ++tx)
      for (int r = 0; r < 7; ++r)
        for (int c = 0; c < 7; ++c)
          if (p.open(r, c))
            w(tx, ty) += overlap(tx / double(a), (tx + 1) / double(a), c / 7.0, (c + 1) / 7.0) *
                         overlap(ty / double(a), (ty + 1) / double(a), r / 7.0, (r + 1) / 7.0);
  const double s = std::accumulate(w.values().begin(), w.values().end(), 0.0);
  for (double& v : w.values()) v /= s;
  return w;
}

TEST(Grid, CropAndRotate) {
  Plane g(3, 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 3; ++x) g(x, y) = 10 * y + x;
  const Plane c = crop(g, 1, 0, 2, 2);
  EXPECT_EQ(c(0, 0), 1);
  EXPECT_EQ(c(1, 1), 12);
  const Plane r = rotate180(g);
  EXPECT_EQ(r(0, 0), 12);
  EXPECT_EQ(r(2, 1), 0);
  EXPECT_EQ(rotate180(r), g);
  EXPECT_THROW(crop(g, 2, 0, 2, 1), DimensionError);
}

TEST(Image, ClampsAndRejectsNonFinite) {
  Plane p(2, 1);
  p(0, 0) = -0.5;
  p(1, 0) = 1.5;
  const Image img(p);
  EXPECT_EQ(img(0, 0), 0.0);
  EXPECT_EQ(img(1, 0), 1.0);
  p(0, 0) = std::nan("");
  EXPECT_THROW(Image{p}, Error);
}

TEST(Pgm, SixteenBitRoundTrip) {
  testing::TempDir dir;
  const Image img = random_image(13, 7, 3);
  write_pgm(dir / "a.pgm", img);
  const Image back = read_pgm(dir / "a.pgm");
  ASSERT_EQ(back.width(), 13);
  ASSERT_EQ(back.height(), 7);
  EXPECT_LE(max_abs_diff(back.plane(), img.plane()), 0.5 / 65535 + 1e-12);
}

TEST(Pgm, EightBitRoundTrip) {
  testing::TempDir dir;
  const Image img = random_image(5, 4, 4);
  write_pgm(dir / "a.pgm", img, 8);
  EXPECT_LE(max_abs_diff(read_pgm(dir / "a.pgm").plane(), img.plane()), 0.5 / 255 + 1e-12);
  EXPECT_THROW(write_pgm(dir / "b.pgm", img, 12), ConfigError);
}

TEST(Pgm, AsciiWithComments) {
  testing::TempDir dir;
  std::ofstream(dir / "a.pgm") << "P2\n# made by hand\n3 1\n# max\n4\n0 2 4\n";
  const Image img = read_pgm(dir / "a.pgm");
  EXPECT_DOUBLE_EQ(img(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(img(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(img(2, 0), 1.0);
}

TEST(Pgm, RejectsBadFiles) {
  testing::TempDir dir;
  std::ofstream(dir / "magic.pgm") << "P6\n1 1\n255\n";
  std::ofstream(dir / "short.pgm") << "P2\n2 2\n255\n1 2 3\n";
  std::ofstream(dir / "range.pgm") << "P2\n1 1\n10\n11\n";
  EXPECT_THROW(read_pgm(dir / "magic.pgm"), FormatError);
  EXPECT_THROW(read_pgm(dir / "short.pgm"), FormatError);
  EXPECT_THROW(read_pgm(dir / "range.pgm"), FormatError);
  EXPECT_THROW(read_pgm(dir / "missing.pgm"), FormatError);
}

TEST(Dft, ConstantImageHasOnlyDc) {
  for (auto [w, h] : {std::pair{5, 4}, std::pair{8, 8}, std::pair{1, 3}}) {
    const Spectrum f = dft(Plane(w, h, 0.3), w, h);
    EXPECT_NEAR(f(0, 0).real(), 0.3 * w * h, 1e-10);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (x || y) EXPECT_LT(std::abs(f(x, y)), 1e-10);
  }
}

TEST(Dft, SinglePixel) {
  const Spectrum f = dft(Plane(1, 1, 0.7), 1, 1);
  EXPECT_NEAR(f(0, 0).real(), 0.7, 1e-15);
  EXPECT_NEAR(f(0, 0).imag(), 0.0, 1e-15);
}

TEST(Dft, MatchesDirectSummationWithPadding) {
  const Plane x = random_image(7, 5, 11).plane();
  const Spectrum f = dft(x, 11, 9);
  EXPECT_LT(max_abs_diff(f, oracle::naive_dft(x, 11, 9)), 1e-10);
}

TEST(Dft, RoundTrip) {
  const Plane x = random_image(8, 8, 12).plane();
  EXPECT_LT(max_abs_diff(idft(dft(x, 8, 8)), x), 1e-10);
  const Plane y = random_image(6, 10, 13).plane();
  EXPECT_LT(max_abs_diff(idft(dft(y, 15, 12), 6, 10), y), 1e-10);
}

TEST(Dft, RejectsBadPads) {
  const Plane x(4, 4, 0.5);
  EXPECT_THROW(dft(x, 3, 4), DimensionError);
  EXPECT_THROW(dft(x, 0, 0), DimensionError);
}

TEST(Dft, FftSizeHasSmallFactors) {
  for (int n = 1; n < 300; ++n) {
    int m = fft_size(n);
    EXPECT_GE(m, n);
    for (int p : {2, 3, 5})
      while (m % p == 0) m /= p;
    EXPECT_EQ(m, 1) << n;
  }
  EXPECT_EQ(fft_size(97), 100);
}

TEST(Pattern, ParseAndPrint) {
  const std::string text = "# comment\n0000011\n0000000\n1100000\n1000000\n1000000\n1100011\n1100111\n";
  const AperturePattern p = parse_pattern(text);
  EXPECT_EQ(p.open_count(), 15);
  EXPECT_TRUE(p.open(0, 5));
  EXPECT_FALSE(p.open(0, 0));
  EXPECT_EQ(parse_pattern(p.rows()), p);
  EXPECT_EQ(p, testing::selected_pattern());
  EXPECT_THROW(parse_pattern("0000000\n"), FormatError);
  EXPECT_THROW(parse_pattern(std::string(7, 'x') + "\n" + text.substr(10)), FormatError);
}

TEST(Pattern, RejectsEmptyAndOutOfGrid) {
  EXPECT_THROW(AperturePattern(0), InvalidPatternError);
  EXPECT_THROW(AperturePattern(std::uint64_t{1} << 49), InvalidPatternError);
  EXPECT_THROW(parse_pattern("0000000\n0000000\n0000000\n0000000\n0000000\n0000000\n0000000\n"), InvalidPatternError);
}

TEST(Pattern, ReferenceApertures) {
  EXPECT_EQ(patterns::full_open().open_count(), 49);
  EXPECT_EQ(patterns::pinhole().open_count(), 1);
  EXPECT_TRUE(patterns::pinhole().open(3, 3));
  EXPECT_EQ(patterns::open_circular().open_count(), 37);
  EXPECT_TRUE(patterns::open_circular().point_symmetric());
  for (int n = 1; n <= 49; ++n) EXPECT_EQ(patterns::conventional(n).open_count(), n);
  EXPECT_TRUE(patterns::conventional(13).point_symmetric());
  EXPECT_FALSE(testing::selected_pattern().point_symmetric());
}

TEST(Pattern, FileRoundTrip) {
  testing::TempDir dir;
  const AperturePattern p = testing::random_pattern(21);
  write_pattern_file(dir / "p.txt", p, "random");
  EXPECT_EQ(read_pattern_file(dir / "p.txt"), p);
}

TEST(Psf, UnitScaleIsDelta) {
  for (int s : {1, -1}) {
    const Psf k = psf_from_pattern(testing::selected_pattern(), BlurScale(s));
    ASSERT_EQ(k.width(), 1);
    EXPECT_EQ(k.kernel()(0, 0), 1.0);
  }
}

TEST(Psf, NativeScaleCopiesGrid) {
  const AperturePattern p = testing::selected_pattern();
  const Psf k = psf_from_pattern(p, BlurScale(7));
  for (int r = 0; r < 7; ++r)
    for (int c = 0; c < 7; ++c) EXPECT_DOUBLE_EQ(k.kernel()(c, r), p.open(r, c) ? 1.0 / 15 : 0.0);
  EXPECT_EQ(psf_from_pattern(p, BlurScale(-7)).kernel(), rotate180(k.kernel()));
}

TEST(Psf, DoubleScaleRepeatsCells) {
  const AperturePattern p = testing::random_pattern(5);
  const Psf k = psf_from_pattern(p, BlurScale(14));
  for (int y = 0; y < 14; ++y)
    for (int x = 0; x < 14; ++x)
      EXPECT_DOUBLE_EQ(k.kernel()(x, y), p.open(y / 2, x / 2) ? 0.25 / p.open_count() : 0.0);
}

TEST(Psf, MatchesAreaWeightedOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const AperturePattern p = testing::random_pattern(seed);
    for (int s = 2; s <= 19; ++s) {
      const Psf k = psf_from_pattern(p, BlurScale(s));
      EXPECT_LT(max_abs_diff(k.kernel(), area_weights(p, s)), 1e-12) << "seed " << seed << " s " << s;
    }
  }
}

TEST(Psf, NormalizedNonNegativeForAllScales) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const AperturePattern p = testing::random_pattern(seed);
    for (int s = -19; s <= 19; ++s) {
      if (s == 0) continue;
      const Psf k = psf_from_pattern(p, BlurScale(s));
      EXPECT_EQ(k.width(), std::abs(s));
      double sum = 0.0;
      for (double v : k.kernel().values()) {
        EXPECT_GE(v, 0.0);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Psf, FlipIsInvolutionAndSymmetricPatternsAreFixed) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const AperturePattern p = testing::random_pattern(seed);
    const AperturePattern q = testing::random_symmetric_pattern(seed);
    for (int s = 2; s <= 12; ++s) {
      const Psf k = psf_from_pattern(p, BlurScale(s));
      EXPECT_EQ(rotate180(rotate180(k)).kernel(), k.kernel());
      EXPECT_EQ(psf_from_pattern(p, BlurScale(-s)).kernel(), rotate180(k).kernel());
      const Psf ks = psf_from_pattern(q, BlurScale(s));
      EXPECT_LT(max_abs_diff(rotate180(ks).kernel(), ks.kernel()), 1e-12);
    }
  }
}

TEST(Psf, FullOpenIsUniform) {
  for (int s = 2; s <= 19; ++s) {
    const Psf k = psf_from_pattern(patterns::full_open(), BlurScale(s));
    for (double v : k.kernel().values()) EXPECT_NEAR(v, 1.0 / (s * s), 1e-15);
  }
}

TEST(Psf, RejectsZeroScaleAndBadWeights) {
  EXPECT_THROW(BlurScale(0), DomainError);
  Plane w(2, 2, 0.25);
  w(0, 0) = -0.25;
  EXPECT_THROW(Psf::normalized(w, 2), DomainError);
  EXPECT_THROW(Psf::normalized(Plane(2, 2, 0.0), 2), DomainError);
  EXPECT_THROW(Psf(Plane(2, 2, 0.3), 2), DomainError);
}

TEST(Psf, KernelSpectrumMatchesDirectSummation) {
  for (int s : {2, 3, 4, 7, -6}) {
    const Psf k = psf_from_pattern(testing::selected_pattern(), BlurScale(s));
    const Spectrum fast = kernel_spectrum(k, 16, 12);
    EXPECT_LT(max_abs_diff(fast, oracle::naive_kernel_spectrum(k.kernel(), k.center_x(), k.center_y(), 16, 12)),
              1e-12);
    EXPECT_NEAR(fast(0, 0).real(), 1.0, 1e-12);
  }
  EXPECT_THROW(kernel_spectrum(psf_from_pattern(patterns::full_open(), BlurScale(9)), 8, 8), DimensionError);
}

TEST(Psf, BankFileRoundTrip) {
  testing::TempDir dir;
  std::map<int, Psf> bank;
  for (int s : {-3, 2, 5}) bank.emplace(s, psf_from_pattern(testing::selected_pattern(), BlurScale(s)));
  write_psf_bank(dir.path(), bank);
  const auto back = read_psf_bank(dir.path());
  ASSERT_EQ(back.size(), 3u);
  for (const auto& [s, k] : bank) EXPECT_LT(max_abs_diff(back.at(s).kernel(), k.kernel()), 1e-15);
  std::ofstream(dir / "bad.txt") << "2 2\n0.5 0.5\n-0.5 0.5\n";
  EXPECT_THROW(read_psf_file(dir / "bad.txt", 2), Error);
}

TEST(Blur, DeltaKernelNoNoiseIsIdentity) {
  const Image img = random_image(16, 12, 1);
  EXPECT_EQ(blur(img, Psf::delta(), 0.0, std::uint64_t{1}), img);
}

TEST(Blur, ConstantImageStaysConstant) {
  const Image img(20, 20, 0.4);
  const Image b = blur(img, psf_from_pattern(testing::selected_pattern(), BlurScale(9)), 0.0, std::uint64_t{1});
  for (double v : b.plane().values()) EXPECT_NEAR(v, 0.4, 1e-12);
}

TEST(Blur, MatchesDirectConvolution) {
  const Image img = random_image(24, 20, 2);
  for (int s : {3, 4, -5, 8}) {
    const Psf k = psf_from_pattern(testing::selected_pattern(), BlurScale(s));
    const Image b = blur(img, k, 0.0, std::uint64_t{1});
    EXPECT_LT(max_abs_diff(b.plane(), oracle::direct_convolution(img.plane(), k.kernel(), k.center_x(), k.center_y())),
              1e-12);
  }
}

TEST(Blur, InteriorMatchesSpectralProduct) {
  const Image img = random_image(32, 32, 3);
  const Psf k = psf_from_pattern(testing::selected_pattern(), BlurScale(-6));
  const Plane b = blur(img, k, 0.0, std::uint64_t{1}).plane();
  Spectrum f = dft(img.plane(), 32, 32);
  const Spectrum ks = kernel_spectrum(k, 32, 32);
  for (std::size_t i = 0; i < f.size(); ++i) f.values()[i] *= ks.values()[i];
  const Plane circ = idft(f);
  for (int y = 6; y < 26; ++y)
    for (int x = 6; x < 26; ++x) EXPECT_NEAR(b(x, y), circ(x, y), 1e-12);
}

TEST(Blur, NoiseHasRequestedDeviation) {
  const Image img(128, 128, 0.5);
  const Image b = blur(img, Psf::delta(), 0.01, std::uint64_t{9});
  double m = 0.0;
  double v = 0.0;
  for (double x : b.plane().values()) m += x;
  m /= b.plane().size();
  for (double x : b.plane().values()) v += (x - m) * (x - m);
  v /= b.plane().size() - 1;
  EXPECT_NEAR(std::sqrt(v), 0.01, 5e-4);
  EXPECT_NEAR(m, 0.5, 5e-4);
  EXPECT_EQ(b, blur(img, Psf::delta(), 0.01, std::uint64_t{9}));
}

TEST(Blur, RejectsOversizedKernelAndNegativeSigma) {
  const Image img(8, 8, 0.5);
  EXPECT_THROW(blur(img, psf_from_pattern(patterns::full_open(), BlurScale(9)), 0.0, std::uint64_t{1}),
               DimensionError);
  EXPECT_THROW(blur(img, Psf::delta(), -0.1, std::uint64_t{1}), DomainError);
}

TEST(Prior, ConstantImage) {
  const std::vector<Image> corpus{Image(8, 8, 0.25)};
  const NaturalImagePrior p = estimate_prior(corpus, 8, 8);
  EXPECT_NEAR(p.a(0, 0), std::pow(0.25 * 64, 2), 1e-9);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      if (x || y) EXPECT_EQ(p.a(x, y), NaturalImagePrior::kFloor);
}

TEST(Prior, MeanOfPowerSpectra) {
  const std::vector<Image> corpus{random_image(6, 6, 1), random_image(6, 6, 2)};
  const NaturalImagePrior p = estimate_prior(corpus, 8, 8);
  const ComplexPlane a = oracle::naive_dft(corpus[0].plane(), 8, 8);
  const ComplexPlane b = oracle::naive_dft(corpus[1].plane(), 8, 8);
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_NEAR(p.a.values()[i], 0.5 * (std::norm(a.values()[i]) + std::norm(b.values()[i])), 1e-9);
  EXPECT_THROW(estimate_prior(std::span<const Image>{}, 8, 8), EmptyInputError);
}

TEST(Prior, BundledPriorFallsOffWithFrequency) {
  const NaturalImagePrior& p = testing::prior_a1();
  ASSERT_EQ(p.width(), 64);
  EXPECT_NEAR(std::accumulate(p.a.values().begin(), p.a.values().end(), 0.0) / p.a.size(), 1.0, 1e-9);
  // Radial average over integer frequency radius; must decrease almost
  // monotonically (Spearman correlation with radius close to -1).
  std::vector<double> sum(46, 0.0);
  std::vector<int> count(46, 0);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      const int fx = x < 32 ? x : x - 64;
      const int fy = y < 32 ? y : y - 64;
      const int r = static_cast<int>(std::lround(std::hypot(fx, fy)));
      sum[r] += p.a(x, y);
      ++count[r];
    }
  std::vector<double> radial;
  for (int r = 0; r < 32; ++r) radial.push_back(sum[r] / count[r]);
  std::vector<std::size_t> order(radial.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return radial[a] < radial[b]; });
  std::vector<double> rank(radial.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<double>(i);
  const double n = static_cast<double>(radial.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < rank.size(); ++i) d2 += std::pow(rank[i] - static_cast<double>(i), 2);
  const double spearman = 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
  EXPECT_LT(spearman, -0.9);
}

TEST(Prior, FileRoundTripAndValidation) {
  testing::TempDir dir;
  const std::vector<Image> corpus{random_image(8, 8, 3)};
  const NaturalImagePrior p = estimate_prior(corpus, 8, 8);
  write_prior_file(dir / "a.txt", p);
  const NaturalImagePrior back = read_prior_file(dir / "a.txt");
  for (std::size_t i = 0; i < p.a.size(); ++i)
    EXPECT_NEAR(back.a.values()[i], p.a.values()[i], 1e-12 * p.a.values()[i] + 1e-15);
  std::ofstream(dir / "neg.txt") << "1 2\n1.0 -2.0\n";
  EXPECT_THROW(read_prior_file(dir / "neg.txt"), FormatError);
}

TEST(Optics, InFocusHasNoBlur) {
  const BlurSize b = blur_size(ThinLensConfig{}, 1200.0);
  EXPECT_NEAR(b.diameter_px, 0.0, 1e-9);
  EXPECT_EQ(b.side, 0);
}

TEST(Optics, DefaultLensExample) {
  // v0 = 1/(1/50 - 1/1200), v = 1/(1/50 - 1/1100); diameter = D_a |v - v0| / v0.
  const double v0 = 1.0 / (1.0 / 50 - 1.0 / 1200);
  const double v = 1.0 / (1.0 / 50 - 1.0 / 1100);
  EXPECT_NEAR(v0, 52.1739, 1e-4);
  EXPECT_NEAR(v, 52.3810, 1e-4);
  const double expected = 20.0 * (v - v0) / v0 / 5.1e-3;
  const BlurSize b = blur_size(ThinLensConfig{}, 1100.0);
  EXPECT_NEAR(b.diameter_px, expected, 1e-9);
  EXPECT_NEAR(b.diameter_px, 15.57, 0.01);
  EXPECT_EQ(b.side, 1);
  EXPECT_EQ(blur_size(ThinLensConfig{}, 1500.0).side, -1);
}

TEST(Optics, LinearInApertureAndMonotoneAwayFromFocus) {
  ThinLensConfig lens;
  const double d1 = blur_size(lens, 900.0).diameter_px;
  lens.aperture_diameter_mm *= 2;
  EXPECT_DOUBLE_EQ(blur_size(lens, 900.0).diameter_px, 2 * d1);
  lens = ThinLensConfig{};
  double prev = 0.0;
  for (double u = 1190; u > 100; u -= 50) {
    const double d = blur_size(lens, u).diameter_px;
    EXPECT_GT(d, prev);
    prev = d;
  }
  prev = 0.0;
  for (double u = 1210; u < 20000; u += 500) {
    const double d = blur_size(lens, u).diameter_px;
    EXPECT_GT(d, prev);
    prev = d;
  }
}

TEST(Optics, RejectsObjectsInsideFocalLength) {
  EXPECT_THROW(blur_size(ThinLensConfig{}, 50.0), DomainError);
  EXPECT_THROW(blur_size(ThinLensConfig{}, 10.0), DomainError);
}

}  // namespace
}  // namespace apf
