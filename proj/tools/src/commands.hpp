#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aperture_forge/image.hpp"
#include "aperture_forge/pattern.hpp"
#include "aperture_forge/prior.hpp"
#include "aperture_forge/radiometry.hpp"
#include "manifest.hpp"

namespace apf::cli {

struct Session {
  std::ostream& out;
  RunManifest& manifest;
};

using Action = std::function<void(Session&)>;

// Each registers a subcommand on `app` and points `action` at its body when
// that subcommand is parsed.
void add_evaluate(CLI::App& app, Action& action);
void add_search(CLI::App& app, Action& action);
void add_prior(CLI::App& app, Action& action);
void add_simulate(CLI::App& app, Action& action);
void add_depth(CLI::App& app, Action& action);
void add_deblur(CLI::App& app, Action& action);
void add_quality(CLI::App& app, Action& action);

// Loaders that also record the input in the manifest.
Image load_image(Session& s, const std::filesystem::path& p);
AperturePattern load_pattern(Session& s, const std::filesystem::path& p);
ImagingConfig load_config(Session& s, const std::optional<std::filesystem::path>& p);
NaturalImagePrior load_prior_a1(Session& s, const std::filesystem::path& p);

// Shortest round-trip decimal.
std::string num(double v);

}  // namespace apf::cli
