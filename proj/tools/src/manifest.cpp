#include "manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "aperture_forge/error.hpp"
#include "aperture_forge/version.hpp"

namespace apf::cli {

RunManifest::RunManifest(std::string subcommand, std::vector<std::string> argv)
    : subcommand_(std::move(subcommand)), argv_(std::move(argv)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::begin(const std::filesystem::path& path) {
  path_ = path;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  write(false);
}

void RunManifest::finish() {
  if (!path_.empty()) write(true);
}

void RunManifest::write(bool done) const {
  nlohmann::ordered_json j;
  j["tool"] = "aperture_forge";
  j["version"] = kVersion;
  j["subcommand"] = subcommand_;
  j["argv"] = argv_;
  j["params"] = params_;
  j["seeds"] = seeds_;
  j["inputs"] = inputs_;
  j["outputs"] = outputs_;
  j["status"] = done ? "finished" : "running";
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
  j["duration_s"] = done ? elapsed.count() : 0.0;
  std::ofstream f(path_);
  if (!f) throw FormatError("cannot write manifest " + path_.string());
  f << j.dump(2) << '\n';
}

std::vector<std::string> manifest_argv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open manifest " + path.string());
  try {
    const auto j = nlohmann::json::parse(f);
    return j.at("argv").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace apf::cli
