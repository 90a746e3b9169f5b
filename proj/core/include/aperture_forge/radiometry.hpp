#pragma once

#include <filesystem>
#include <string_view>

namespace apf {

// Scene illumination and sensor model for photon + read noise.
// Defaults are a consumer SLR under office light.
struct ImagingConfig {
  double quantum_efficiency = 0.5;
  double reflectivity = 0.5;
  double exposure_s = 0.01;
  double pixel_um = 5.1;
  double f_number = 18.0;
  double lux = 300.0;
  double read_noise_e = 4.0;

  void validate() const;
};

struct NoiseBudget {
  double j = 0.0;           // photoelectrons per pixel per open hole
  double sigma_n_sq = 0.0;  // total variance for the given hole count, e^2
};

// J = 1e15 * R * I * q * pixel^2 * t / F#^2, pixel pitch in metres.
double photons_per_hole(const ImagingConfig& cfg);

// sigma_r^2 + n * J for 1 <= n <= 49.
double noise_variance(const ImagingConfig& cfg, int open_holes);

NoiseBudget noise_budget(const ImagingConfig& cfg, int open_holes);

// key=value lines; keys q, reflectivity, exposure_s, pixel_um, f_number, lux,
// read_noise_e. Missing keys keep their defaults, '#' starts a comment.
ImagingConfig parse_imaging_config(std::string_view text);
ImagingConfig read_imaging_config(const std::filesystem::path& path);

}  // namespace apf
