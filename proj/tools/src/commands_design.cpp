#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>

#include "aperture_forge/depth.hpp"
#include "aperture_forge/metrics.hpp"
#include "aperture_forge/nsga2.hpp"
#include "commands.hpp"

namespace apf::cli {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Image load_image(Session& s, const fs::path& p) {
  s.manifest.add_input(p);
  return read_pgm(p);
}

AperturePattern load_pattern(Session& s, const fs::path& p) {
  s.manifest.add_input(p);
  return read_pattern_file(p);
}

ImagingConfig load_config(Session& s, const std::optional<fs::path>& p) {
  if (!p) return ImagingConfig{};
  s.manifest.add_input(*p);
  return read_imaging_config(*p);
}

NaturalImagePrior load_prior_a1(Session& s, const fs::path& p) {
  s.manifest.add_input(p);
  return normalized_to_unit_mean(read_prior_file(p));
}

namespace {

ScaleSet positive_scales(const std::string& text) {
  ScaleSet set{parse_scale_list(text)};
  set.validate();
  return set;
}

void begin_optional(Session& s, const std::optional<fs::path>& manifest) {
  if (manifest) s.manifest.begin(*manifest);
}

}  // namespace

void add_evaluate(CLI::App& app, Action& action) {
  struct Opts {
    fs::path pattern;
    std::optional<fs::path> config;
    fs::path prior;
    std::string scales = "1:10";
    bool csv = false;
    std::optional<fs::path> manifest;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("evaluate", "Score a pattern: r_max, d_min, d_r_min");
  sub->add_option("--pattern", o->pattern, "Pattern file")->required();
  sub->add_option("--config", o->config, "Imaging config (key=value)");
  sub->add_option("--prior", o->prior, "Prior matrix file")->required();
  sub->add_option("--scales", o->scales, "Positive scales, a:b or a,b,c")->capture_default_str();
  sub->add_flag("--csv", o->csv, "Print one CSV header and row");
  sub->add_option("--manifest", o->manifest, "Where to write the run manifest");
  sub->callback([&action, o] {
    action = [o](Session& s) {
      begin_optional(s, o->manifest);
      const AperturePattern p = load_pattern(s, o->pattern);
      const ImagingConfig cfg = load_config(s, o->config);
      const NaturalImagePrior prior = load_prior_a1(s, o->prior);
      const PatternScores sc = score_pattern(p, positive_scales(o->scales), cfg, prior);
      if (o->csv) {
        s.out << "r_max,d_min,d_r_min\n" << num(sc.r_max) << ',' << num(sc.d_min) << ',' << num(sc.d_r_min) << '\n';
      } else {
        s.out << "r_max " << num(sc.r_max) << "\nd_min " << num(sc.d_min) << "\nd_r_min " << num(sc.d_r_min) << '\n';
      }
    };
  });
}

void add_search(CLI::App& app, Action& action) {
  struct Opts {
    GaConfig ga;
    std::optional<fs::path> config;
    fs::path prior;
    fs::path out_dir;
    std::string scales = "1:10";
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("search", "NSGA-II pattern search");
  sub->add_option("--pop", o->ga.population_size, "Population size (even, >= 4)")->capture_default_str();
  sub->add_option("--gens", o->ga.generations, "Generations")->capture_default_str();
  sub->add_option("--seed", o->ga.rng_seed, "RNG seed")->capture_default_str();
  sub->add_option("--crossover", o->ga.crossover_prob, "Crossover probability")->capture_default_str();
  sub->add_option("--mutation", o->ga.mutation_prob, "Per-bit mutation probability")->capture_default_str();
  sub->add_option("--config", o->config, "Imaging config (key=value)");
  sub->add_option("--prior", o->prior, "Prior matrix file")->required();
  sub->add_option("--scales", o->scales, "Positive scales, a:b or a,b,c")->capture_default_str();
  sub->add_option("--out-dir", o->out_dir, "Output directory")->required();
  sub->callback([&action, o] {
    action = [o](Session& s) {
      s.manifest.add_seed("ga", o->ga.rng_seed);
      s.manifest.begin(o->out_dir / "manifest.json");
      const ImagingConfig cfg = load_config(s, o->config);
      const NaturalImagePrior prior = load_prior_a1(s, o->prior);
      const ScaleSet scales = positive_scales(o->scales);
      const auto scorer = [&](const AperturePattern& p) { return score_pattern(p, scales, cfg, prior); };
      const auto observer = [&](int gen, std::span<const Individual> pop) {
        if (gen % 10 != 0 && gen != o->ga.generations) return;
        const auto front = std::count_if(pop.begin(), pop.end(), [](const Individual& i) { return i.rank == 0; });
        s.out << "generation " << gen << ": front size " << front << '\n';
      };
      const std::vector<Individual> front = evolve(o->ga, scorer, observer);

      const fs::path csv_path = o->out_dir / "front.csv";
      std::ofstream csv(csv_path);
      if (!csv) throw FormatError("cannot write " + csv_path.string());
      csv << "file,bits,open,r_max,d_min,d_r_min\n";
      for (std::size_t i = 0; i < front.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "front_%03zu.txt", i);
        const AperturePattern p = front[i].pattern();
        write_pattern_file(o->out_dir / name, p);
        s.manifest.add_output(o->out_dir / name);
        const auto& sc = front[i].scores;
        csv << name << ',' << p.bitstring() << ',' << p.open_count() << ',' << num(sc.r_max) << ','
            << num(sc.d_min) << ',' << num(sc.d_r_min) << '\n';
      }
      s.manifest.add_output(csv_path);
      const AperturePattern selected = select_final(front);
      write_pattern_file(o->out_dir / "selected.txt", selected, "largest d_r_min on the final front");
      s.manifest.add_output(o->out_dir / "selected.txt");
      const auto it = std::find_if(front.begin(), front.end(),
                                   [&](const Individual& i) { return i.bits == selected.bits(); });
      s.out << "selected " << selected.bitstring() << " r_max " << num(it->scores.r_max) << " d_min "
            << num(it->scores.d_min) << " d_r_min " << num(it->scores.d_r_min) << '\n'
            << selected.rows();
    };
  });
}

void add_prior(CLI::App& app, Action& action) {
  struct Opts {
    std::vector<fs::path> images;
    int size = kMetricSize;
    fs::path out;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("prior", "Estimate a unit-mean natural-image power spectrum");
  sub->add_option("--images", o->images, "PGM files or directories of PGM files")->required();
  sub->add_option("--size", o->size, "Spectrum side (images are zero-padded to it)")->capture_default_str();
  sub->add_option("--out", o->out, "Prior matrix file")->required();
  sub->callback([&action, o] {
    action = [o](Session& s) {
      s.manifest.begin(fs::path(o->out).concat(".manifest.json"));
      std::vector<fs::path> files;
      for (const fs::path& p : o->images) {
        if (fs::is_directory(p)) {
          std::vector<fs::path> found;
          for (const auto& e : fs::directory_iterator(p))
            if (e.path().extension() == ".pgm") found.push_back(e.path());
          std::sort(found.begin(), found.end());
          files.insert(files.end(), found.begin(), found.end());
        } else {
          files.push_back(p);
        }
      }
      std::vector<Image> corpus;
      for (const fs::path& f : files) corpus.push_back(load_image(s, f));
      const NaturalImagePrior prior = normalized_to_unit_mean(estimate_prior(corpus, o->size, o->size));
      write_prior_file(o->out, prior);
      s.manifest.add_output(o->out);
      s.out << "prior " << o->size << 'x' << o->size << " from " << corpus.size() << " images\n";
    };
  });
}

}  // namespace apf::cli
