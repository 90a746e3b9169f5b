#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace apf::cli {

// Record of one CLI run. Written before any other output and rewritten with
// the output list and duration when the run finishes.
class RunManifest {
 public:
  RunManifest(std::string subcommand, std::vector<std::string> argv);

  void set_param(const std::string& key, const std::string& value) { params_[key] = value; }
  void add_seed(const std::string& key, std::uint64_t seed) { seeds_[key] = seed; }
  void add_input(const std::filesystem::path& p) { inputs_.push_back(p.string()); }
  void add_output(const std::filesystem::path& p) { outputs_.push_back(p.string()); }

  // Remembers the path and writes the manifest; later writes go there too.
  void begin(const std::filesystem::path& path);
  void finish();

  const std::vector<std::string>& argv() const { return argv_; }

 private:
  void write(bool done) const;

  std::string subcommand_;
  std::vector<std::string> argv_;
  std::map<std::string, std::string> params_;
  std::map<std::string, std::uint64_t> seeds_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::filesystem::path path_;
  std::chrono::steady_clock::time_point start_;
};

// argv recorded in a manifest file.
std::vector<std::string> manifest_argv(const std::filesystem::path& path);

}  // namespace apf::cli
