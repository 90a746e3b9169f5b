#include "aperture_forge_cli/cli.hpp"

#include <iostream>

#include "aperture_forge/error.hpp"
#include "aperture_forge/version.hpp"
#include "commands.hpp"

namespace apf::cli {

namespace {

void record_params(const CLI::App& sub, RunManifest& manifest) {
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_name() == "--help") continue;
    std::string key = opt->get_name();
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    std::string value;
    if (opt->count() > 0) {
      for (const std::string& r : opt->results()) value += (value.empty() ? "" : ",") + r;
      if (opt->get_type_size() == 0 && value.empty()) value = "true";
    } else {
      value = opt->get_default_str();
    }
    manifest.set_param(key, value);
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
  CLI::App app{"Coded-aperture design, depth from defocus and deblurring", "aperture_forge"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Action action;
  add_evaluate(app, action);
  add_search(app, action);
  add_simulate(app, action);
  add_depth(app, action);
  add_deblur(app, action);
  add_quality(app, action);
  add_prior(app, action);
  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", replay_path, "Manifest JSON written by an earlier run")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (replay->parsed()) {
      if (depth > 0) throw ConfigError("a manifest cannot replay another replay");
      return dispatch(manifest_argv(replay_path), out, err, depth + 1);
    }
    const CLI::App* sub = app.get_subcommands().front();
    RunManifest manifest(sub->get_name(), args);
    record_params(*sub, manifest);
    Session session{out, manifest};
    action(session);
    manifest.finish();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return dispatch(args, out, err, 0);
}

}  // namespace apf::cli
