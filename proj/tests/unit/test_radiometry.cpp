#include <gtest/gtest.h>

#include <fstream>

#include "aperture_forge/radiometry.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace apf {
namespace {

// 1e15 / 18^2 * 0.5 * 300 * 0.5 * (5.1e-6)^2 * 0.01 = 19507.5 / 324.
constexpr double kDefaultJ = 19507.5 / 324.0;

TEST(Radiometry, PhotonsPerHoleDefaults) {
  const ImagingConfig cfg;
  const double j = photons_per_hole(cfg);
  EXPECT_NEAR(j, kDefaultJ, 1e-9 * kDefaultJ);
  EXPECT_NEAR(j, 60.208, 1e-3);
  EXPECT_NEAR(j, oracle::photons(0.5, 0.5, 0.01, 5.1, 18, 300), 1e-9 * kDefaultJ);
}

TEST(Radiometry, PhotonsScaleWithInputs) {
  const ImagingConfig base;
  const double j = photons_per_hole(base);
  ImagingConfig c = base;
  c.exposure_s *= 2;
  EXPECT_NEAR(photons_per_hole(c), 2 * j, 1e-12 * j);
  c = base;
  c.f_number *= 2;
  EXPECT_NEAR(photons_per_hole(c), j / 4, 1e-12 * j);
  c = base;
  c.lux *= 3;
  EXPECT_NEAR(photons_per_hole(c), 3 * j, 1e-12 * j);
  c = base;
  c.pixel_um *= 2;
  EXPECT_NEAR(photons_per_hole(c), 4 * j, 1e-12 * j);
}

TEST(Radiometry, NoiseVariance) {
  const ImagingConfig cfg;
  EXPECT_NEAR(noise_variance(cfg, 20), 16 + 20 * kDefaultJ, 1e-9);
  EXPECT_NEAR(noise_variance(cfg, 20), 1220.2, 0.05);
  EXPECT_NEAR(noise_variance(cfg, 1), 16 + kDefaultJ, 1e-9);
  for (int n = 1; n <= 24; ++n)
    EXPECT_NEAR(noise_variance(cfg, 2 * n) - noise_variance(cfg, n), n * photons_per_hole(cfg), 1e-12 * n * kDefaultJ);
  const NoiseBudget b = noise_budget(cfg, 15);
  EXPECT_DOUBLE_EQ(b.j, photons_per_hole(cfg));
  EXPECT_DOUBLE_EQ(b.sigma_n_sq, noise_variance(cfg, 15));
}

TEST(Radiometry, HoleCountDomain) {
  const ImagingConfig cfg;
  EXPECT_THROW(noise_variance(cfg, 0), DomainError);
  EXPECT_THROW(noise_variance(cfg, 50), DomainError);
  EXPECT_NO_THROW(noise_variance(cfg, 49));
}

TEST(Radiometry, Validation) {
  ImagingConfig c;
  c.quantum_efficiency = 1.2;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ImagingConfig{};
  c.reflectivity = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ImagingConfig{};
  c.f_number = -2;
  EXPECT_THROW(photons_per_hole(c), ConfigError);
  c = ImagingConfig{};
  c.read_noise_e = 0.0;
  EXPECT_NO_THROW(c.validate());
  c.read_noise_e = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Radiometry, ParseConfig) {
  const ImagingConfig c = parse_imaging_config("# office\nf_number = 2\nlux=500  # bright\n\nread_noise_e=3\n");
  EXPECT_EQ(c.f_number, 2.0);
  EXPECT_EQ(c.lux, 500.0);
  EXPECT_EQ(c.read_noise_e, 3.0);
  EXPECT_EQ(c.quantum_efficiency, 0.5);
  EXPECT_THROW(parse_imaging_config("aperture=3\n"), FormatError);
  EXPECT_THROW(parse_imaging_config("lux\n"), FormatError);
  EXPECT_THROW(parse_imaging_config("lux=bright\n"), FormatError);
  EXPECT_THROW(parse_imaging_config("q=1.5\n"), ConfigError);
}

TEST(Radiometry, ReadConfigFile) {
  testing::TempDir dir;
  std::ofstream(dir / "cam.cfg") << "exposure_s=0.02\n";
  EXPECT_EQ(read_imaging_config(dir / "cam.cfg").exposure_s, 0.02);
  EXPECT_THROW(read_imaging_config(dir / "missing.cfg"), Error);
}

}  // namespace
}  // namespace apf
