#include "aperture_forge/radiometry.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "aperture_forge/error.hpp"

namespace apf {

void ImagingConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be strictly positive");
  };
  positive(quantum_efficiency, "q");
  positive(reflectivity, "reflectivity");
  positive(exposure_s, "exposure_s");
  positive(pixel_um, "pixel_um");
  positive(f_number, "f_number");
  positive(lux, "lux");
  if (!(read_noise_e >= 0.0)) throw ConfigError("read_noise_e must be non-negative");
  if (quantum_efficiency > 1.0) throw ConfigError("q must be at most 1");
  if (reflectivity > 1.0) throw ConfigError("reflectivity must be at most 1");
}

double photons_per_hole(const ImagingConfig& cfg) {
  cfg.validate();
  const double pixel_m = cfg.pixel_um * 1e-6;
  return 1e15 / (cfg.f_number * cfg.f_number) * cfg.reflectivity * cfg.lux * cfg.quantum_efficiency * pixel_m *
         pixel_m * cfg.exposure_s;
}

double noise_variance(const ImagingConfig& cfg, int open_holes) {
  if (open_holes < 1 || open_holes > 49) throw DomainError("open hole count must be in [1, 49]");
  return cfg.read_noise_e * cfg.read_noise_e + open_holes * photons_per_hole(cfg);
}

NoiseBudget noise_budget(const ImagingConfig& cfg, int open_holes) {
  return NoiseBudget{photons_per_hole(cfg), noise_variance(cfg, open_holes)};
}

ImagingConfig parse_imaging_config(std::string_view text) {
  ImagingConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("config line " + std::to_string(lineno) + ": expected key=value");
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string raw = strip(line.substr(eq + 1));
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
      throw FormatError("config line " + std::to_string(lineno) + ": bad number '" + raw + "'");
    }
    if (key == "q") cfg.quantum_efficiency = value;
    else if (key == "reflectivity") cfg.reflectivity = value;
    else if (key == "exposure_s") cfg.exposure_s = value;
    else if (key == "pixel_um") cfg.pixel_um = value;
    else if (key == "f_number") cfg.f_number = value;
    else if (key == "lux") cfg.lux = value;
    else if (key == "read_noise_e") cfg.read_noise_e = value;
    else throw FormatError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ImagingConfig read_imaging_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_imaging_config(ss.str());
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace apf
