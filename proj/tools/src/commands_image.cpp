#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "aperture_forge/blur.hpp"
#include "aperture_forge/deconv.hpp"
#include "aperture_forge/depth.hpp"
#include "aperture_forge/quality.hpp"
#include "commands.hpp"

namespace apf::cli {

namespace fs = std::filesystem;

namespace {

struct KernelSource {
  std::optional<fs::path> psf;
  std::optional<fs::path> pattern;
  std::optional<int> scale;

  void add(CLI::App* sub) {
    auto* psf_opt = sub->add_option("--psf", psf, "PSF matrix file");
    auto* pat_opt = sub->add_option("--pattern", pattern, "Pattern file (with --scale)");
    psf_opt->excludes(pat_opt);
    sub->add_option("--scale", scale, "Signed blur scale");
  }

  Psf load(Session& s) const {
    if (psf) {
      s.manifest.add_input(*psf);
      return read_psf_file(*psf, scale.value_or(1));
    }
    if (!pattern) throw ConfigError("give --psf or --pattern with --scale");
    if (!scale) throw ConfigError("--pattern needs --scale");
    return psf_from_pattern(load_pattern(s, *pattern), BlurScale(*scale));
  }
};

fs::path sidecar(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension();
  return p.concat(suffix);
}

void write_text(Session& s, const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw FormatError("cannot write " + p.string());
  f << text;
  s.manifest.add_output(p);
}

void write_image(Session& s, const fs::path& p, const Image& img) {
  write_pgm(p, img, 16);
  s.manifest.add_output(p);
}

// Label indices as an 8-bit PGM scaled so that label k maps to k (up to 255).
void write_labels(Session& s, const fs::path& p, const Grid<int>& labels) {
  const int top = std::max(1, *std::max_element(labels.values().begin(), labels.values().end()));
  Plane v(labels.width(), labels.height());
  const int depth = top > 255 ? 16 : 8;
  const double full = depth == 8 ? 255.0 : 65535.0;
  for (int y = 0; y < labels.height(); ++y)
    for (int x = 0; x < labels.width(); ++x) v(x, y) = labels(x, y) / full;
  write_pgm(p, Image(v), depth);
  s.manifest.add_output(p);
}

KernelBank load_bank(Session& s, const std::optional<fs::path>& dir, const std::optional<fs::path>& pattern,
                     const std::string& scales) {
  if (dir) {
    s.manifest.add_input(*dir);
    return KernelBank::from_directory(*dir);
  }
  if (!pattern) throw ConfigError("give --bank-dir or --pattern with --scales");
  return KernelBank::from_pattern(load_pattern(s, *pattern), parse_scale_list(scales));
}

DeconvMethod parse_method(const std::string& m) {
  if (m == "wiener") return DeconvMethod::wiener;
  if (m == "sparse") return DeconvMethod::sparse;
  throw ConfigError("unknown method '" + m + "'");
}

}  // namespace

void add_simulate(CLI::App& app, Action& action) {
  struct Opts {
    fs::path image;
    KernelSource kernel;
    double sigma = 0.0;
    std::uint64_t seed = 1;
    std::optional<fs::path> out;
    std::optional<std::string> scales;
    std::string sigmas = "0.001,0.005,0.01";
    std::optional<fs::path> out_dir;
    std::optional<std::string> regions;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("simulate", "Blur an image with a pattern PSF and add noise");
  sub->add_option("--image", o->image, "Sharp input PGM")->required();
  o->kernel.add(sub);
  sub->add_option("--sigma", o->sigma, "Noise std in intensity units")->capture_default_str();
  sub->add_option("--seed", o->seed, "Noise seed")->capture_default_str();
  sub->add_option("--out", o->out, "Output PGM (single or two-region scene)");
  sub->add_option("--scales", o->scales, "Batch mode: scale range a:b (with --pattern)");
  sub->add_option("--sigmas", o->sigmas, "Batch mode: comma-separated noise levels")->capture_default_str();
  sub->add_option("--out-dir", o->out_dir, "Batch mode output directory");
  sub->add_option("--regions", o->regions, "Two-region scene: left,right scales (with --pattern)");
  sub->callback([&action, o] {
    action = [o](Session& s) {
      s.manifest.add_seed("noise", o->seed);
      Rng rng(o->seed);
      if (o->scales) {
        if (!o->out_dir) throw ConfigError("batch mode needs --out-dir");
        if (!o->kernel.pattern) throw ConfigError("batch mode needs --pattern");
        s.manifest.begin(*o->out_dir / "manifest.json");
        const Image img = load_image(s, o->image);
        const AperturePattern p = load_pattern(s, *o->kernel.pattern);
        std::vector<double> sigmas;
        std::stringstream ss(o->sigmas);
        for (std::string tok; std::getline(ss, tok, ',');) sigmas.push_back(std::stod(tok));
        std::string index = "file,scale,sigma\n";
        for (int sc : parse_scale_list(*o->scales))
          for (double sg : sigmas) {
            const std::string name = "blur_s" + std::to_string(sc) + "_sigma" + num(sg) + ".pgm";
            write_image(s, *o->out_dir / name, blur(img, psf_from_pattern(p, BlurScale(sc)), sg, rng));
            index += name + ',' + std::to_string(sc) + ',' + num(sg) + '\n';
          }
        write_text(s, *o->out_dir / "index.csv", index);
        return;
      }
      if (!o->out) throw ConfigError("--out is required");
      s.manifest.begin(sidecar(*o->out, ".manifest.json"));
      const Image img = load_image(s, o->image);
      if (o->regions) {
        const std::vector<int> sc = parse_scale_list(*o->regions);
        if (sc.size() != 2) throw ConfigError("--regions takes two scales");
        if (!o->kernel.pattern) throw ConfigError("two-region mode needs --pattern");
        const AperturePattern p = load_pattern(s, *o->kernel.pattern);
        const Image left = blur(img, psf_from_pattern(p, BlurScale(sc[0])), o->sigma, rng);
        const Image right = blur(img, psf_from_pattern(p, BlurScale(sc[1])), o->sigma, rng);
        Plane v(img.width(), img.height());
        Grid<int> truth(img.width(), img.height());
        for (int y = 0; y < img.height(); ++y)
          for (int x = 0; x < img.width(); ++x) {
            const bool is_left = x < img.width() / 2;
            v(x, y) = is_left ? left(x, y) : right(x, y);
            truth(x, y) = is_left ? 0 : 1;
          }
        write_image(s, *o->out, Image(v));
        write_labels(s, sidecar(*o->out, ".truth.pgm"), truth);
        write_text(s, sidecar(*o->out, ".truth.csv"),
                   "label,scale\n0," + std::to_string(sc[0]) + "\n1," + std::to_string(sc[1]) + '\n');
        return;
      }
      const Psf psf = o->kernel.load(s);
      write_image(s, *o->out, blur(img, psf, o->sigma, rng));
      write_text(s, sidecar(*o->out, ".truth.csv"), "region,scale\nall," + std::to_string(psf.scale()) + '\n');
    };
  });
}

void add_depth(CLI::App& app, Action& action) {
  struct Opts {
    fs::path image;
    std::optional<fs::path> bank_dir;
    std::optional<fs::path> pattern;
    std::string scales = "-10:10";
    int patch = 48;
    int stride = 8;
    MrfParams mrf;
    double nsr_weight = kEstimationNsrWeight;
    int margin = EstimateOptions{}.margin;
    fs::path out_dir;
    bool probs = false;
    std::optional<std::string> all_focus;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("depth", "Depth map from a single coded-aperture image");
  sub->add_option("--image", o->image, "Blurred input PGM")->required();
  sub->add_option("--bank-dir", o->bank_dir, "Directory of psf_<s>.txt files");
  sub->add_option("--pattern", o->pattern, "Pattern file for a synthetic bank");
  sub->add_option("--scales", o->scales, "Synthetic bank scales, a:b or list")->capture_default_str();
  sub->add_option("--patch", o->patch, "Window side in pixels")->capture_default_str();
  sub->add_option("--stride", o->stride, "Window stride in pixels")->capture_default_str();
  sub->add_option("--lambda0", o->mrf.lambda0, "Smoothness weight")->capture_default_str();
  sub->add_option("--sigma-lambda", o->mrf.sigma_lambda, "Intensity scale of the smoothness weight")
      ->capture_default_str();
  sub->add_option("--nsr-weight", o->nsr_weight, "Gradient NSR weight of the Wiener deblur")->capture_default_str();
  sub->add_option("--margin", o->margin, "Pixels ignored at each window border when scoring")->capture_default_str();
  sub->add_option("--out-dir", o->out_dir, "Output directory")->required();
  sub->add_flag("--probs", o->probs, "Also write the raw per-pixel probabilities");
  sub->add_option("--all-focus", o->all_focus, "Also deblur with the depth map: wiener or sparse");
  sub->callback([&action, o] {
    action = [o](Session& s) {
      s.manifest.begin(o->out_dir / "manifest.json");
      const Image img = load_image(s, o->image);
      const KernelBank bank = load_bank(s, o->bank_dir, o->pattern, o->scales);
      const NsrMatrix c = estimation_nsr(o->patch, o->patch, bank, o->nsr_weight);
      EstimateOptions est;
      est.margin = o->margin;
      const DepthVolume vol = raw_depth_volume(img, bank, c, o->patch, o->stride, est);
      MrfStats stats;
      const DepthMap map = solve_mrf(data_term(vol, o->mrf), img, o->mrf, &stats);

      write_labels(s, o->out_dir / "labels.pgm", map.labels);
      std::string legend = "label,scale\n";
      for (std::size_t k = 0; k < map.legend.size(); ++k)
        legend += std::to_string(k) + ',' + std::to_string(map.legend[k]) + '\n';
      write_text(s, o->out_dir / "legend.csv", legend);
      if (o->probs) {
        std::string dump = "x,y,scale,probability\n";
        for (int y = 0; y < vol.height; ++y)
          for (int x = 0; x < vol.width; ++x)
            for (std::size_t k = 0; k < vol.labels(); ++k)
              if (vol.at(x, y, k) > 0.0)
                dump += std::to_string(x) + ',' + std::to_string(y) + ',' + std::to_string(vol.legend[k]) + ',' +
                        num(vol.at(x, y, k)) + '\n';
        write_text(s, o->out_dir / "probs.csv", dump);
      }
      if (o->all_focus) {
        DeconvConfig dc;
        dc.method = parse_method(*o->all_focus);
        write_image(s, o->out_dir / "all_focus.pgm", deblur_with_depthmap(img, map, bank, dc));
      }

      std::map<int, long> counts;
      for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) ++counts[map.scale_at(x, y)];
      const auto mode = std::max_element(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : milder_scale(b.first, a.first);
      });
      s.out << "modal_scale " << mode->first << "\nenergy " << num(stats.initial_energy) << " -> "
            << num(stats.final_energy) << " in " << stats.sweeps << " sweeps\n";
    };
  });
}

void add_deblur(CLI::App& app, Action& action) {
  struct Opts {
    fs::path image;
    KernelSource kernel;
    std::string method = "sparse";
    DeconvConfig cfg;
    fs::path out;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("deblur", "Non-blind deconvolution with one kernel");
  sub->add_option("--image", o->image, "Blurred input PGM")->required();
  o->kernel.add(sub);
  sub->add_option("--method", o->method, "wiener or sparse")->capture_default_str();
  sub->add_option("--reg", o->cfg.reg_weight, "Regularization weight")->capture_default_str();
  sub->add_option("--irls-iters", o->cfg.irls_iters, "IRLS iterations")->capture_default_str();
  sub->add_option("--cg-iters", o->cfg.cg_iters, "CG iterations per IRLS step")->capture_default_str();
  sub->add_option("--out", o->out, "Output PGM")->required();
  sub->callback([&action, o] {
    action = [o](Session& s) {
      s.manifest.begin(sidecar(o->out, ".manifest.json"));
      const Image img = load_image(s, o->image);
      const Psf psf = o->kernel.load(s);
      DeconvConfig cfg = o->cfg;
      cfg.method = parse_method(o->method);
      const NsrMatrix c = canvas_nsr(img.width(), img.height(), std::max(psf.width(), psf.height()), cfg.reg_weight);
      const DeconvResult r = deconvolve(img.plane(), psf, cfg, c);
      write_image(s, o->out, r.image());
      if (!r.converged) s.out << "warning: conjugate gradients stopped before reaching the tolerance\n";
      if (!r.objective.empty()) s.out << "objective " << num(r.objective.front()) << " -> " << num(r.objective.back()) << '\n';
    };
  });
}

void add_quality(CLI::App& app, Action& action) {
  struct Opts {
    fs::path blurred;
    fs::path deblurred;
    bool csv = false;
    std::optional<fs::path> manifest;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("quality", "No-reference quality of a deblurred image");
  sub->add_option("blurred", o->blurred, "Blurred PGM")->required();
  sub->add_option("deblurred", o->deblurred, "Deblurred PGM")->required();
  sub->add_flag("--csv", o->csv, "Print one CSV header and row");
  sub->add_option("--manifest", o->manifest, "Where to write the run manifest");
  sub->callback([&action, o] {
    action = [o](Session& s) {
      if (o->manifest) s.manifest.begin(*o->manifest);
      const QualityReport r = aggregate_quality(load_image(s, o->blurred), load_image(s, o->deblurred));
      if (o->csv) {
        s.out << "norm_sparsity,sharpness_index,sparsity_prior,pyramid_ring,aggregate\n"
              << num(r.norm_sparsity) << ',' << num(r.sharpness_index) << ',' << num(r.sparsity_prior) << ','
              << num(r.pyramid_ring) << ',' << num(r.aggregate) << '\n';
      } else {
        s.out << "norm_sparsity " << num(r.norm_sparsity) << "\nsharpness_index " << num(r.sharpness_index)
              << "\nsparsity_prior " << num(r.sparsity_prior) << "\npyramid_ring " << num(r.pyramid_ring)
              << "\naggregate " << num(r.aggregate) << '\n';
      }
    };
  });
}

}  // namespace apf::cli
