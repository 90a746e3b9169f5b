#include "aperture_forge/psf.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "aperture_forge/error.hpp"

namespace apf {

BlurScale::BlurScale(int s) : s_(s) {
  if (s == 0) throw DomainError("blur scale 0 is undefined");
}

Psf::Psf(Plane kernel, int scale) : kernel_(std::move(kernel)), scale_(scale) {
  if (kernel_.empty()) throw DimensionError("empty PSF kernel");
  double sum = 0.0;
  for (double v : kernel_.values()) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError("PSF entries must be finite and non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) throw DomainError("PSF does not sum to one");
}

Psf Psf::normalized(Plane weights, int scale) {
  double sum = 0.0;
  for (double v : weights.values()) {
    if (!std::isfinite(v)) throw DomainError("PSF weight is not finite");
    if (v < 0.0) throw DomainError("PSF weight is negative");
    sum += v;
  }
  if (weights.empty() || sum <= 0.0) throw DomainError("PSF weights sum to zero");
  for (double& v : weights.values()) v /= sum;
  return Psf(std::move(weights), scale);
}

Psf Psf::delta(int scale) { return Psf(Plane(1, 1, 1.0), scale); }

Psf psf_from_pattern(const AperturePattern& pattern, BlurScale s) {
  constexpr int n = AperturePattern::kSide;
  const int a = s.side();
  if (a == 1) return Psf::delta(s.value());

  // overlap[j][i]: length shared by target cell j and source cell i, in units
  // of 1/a of a source cell. Integer arithmetic keeps the resampling exactly
  // mirror-symmetric.
  std::vector<long> overlap(static_cast<std::size_t>(a) * n, 0);
  for (int j = 0; j < a; ++j)
    for (int i = 0; i < n; ++i) {
      const long lo = std::max<long>(static_cast<long>(n) * j, static_cast<long>(a) * i);
      const long hi = std::min<long>(static_cast<long>(n) * (j + 1), static_cast<long>(a) * (i + 1));
      overlap[static_cast<std::size_t>(j) * n + i] = std::max<long>(0, hi - lo);
    }

  Plane weights(a, a);
  for (int ty = 0; ty < a; ++ty)
    for (int tx = 0; tx < a; ++tx) {
      long acc = 0;
      for (int r = 0; r < n; ++r) {
        const long wy = overlap[static_cast<std::size_t>(ty) * n + r];
        if (wy == 0) continue;
        for (int c = 0; c < n; ++c)
          if (pattern.open(r, c)) acc += wy * overlap[static_cast<std::size_t>(tx) * n + c];
      }
      weights(tx, ty) = static_cast<double>(acc);
    }
  Psf psf = Psf::normalized(std::move(weights), s.side());
  if (s.flipped()) return Psf(rotate180(psf.kernel()), s.value());
  return Psf(psf.kernel(), s.value());
}

Psf rotate180(const Psf& psf) { return Psf(rotate180(psf.kernel()), -psf.scale()); }

Spectrum kernel_spectrum(const Psf& psf, int w, int h) {
  if (psf.width() > w || psf.height() > h) throw DimensionError("kernel larger than the working spectrum");
  ComplexPlane buf(w, h);
  for (int y = 0; y < psf.height(); ++y)
    for (int x = 0; x < psf.width(); ++x) {
      const int bx = ((x - psf.center_x()) % w + w) % w;
      const int by = ((y - psf.center_y()) % h + h) % h;
      buf(bx, by) += psf.kernel()(x, y);
    }
  return forward(buf);
}

Plane read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  int h = 0;
  int w = 0;
  if (!(in >> h >> w) || h <= 0 || w <= 0) throw FormatError(path.string() + ": bad '<h> <w>' header");
  Plane values(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (!(in >> values(x, y))) throw FormatError(path.string() + ": expected " + std::to_string(w * h) + " values");
  std::string extra;
  if (in >> extra) throw FormatError(path.string() + ": trailing data '" + extra + "'");
  return values;
}

void write_matrix_file(const std::filesystem::path& path, const Plane& values) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out.precision(17);
  out << values.height() << ' ' << values.width() << '\n';
  for (int y = 0; y < values.height(); ++y) {
    for (int x = 0; x < values.width(); ++x) out << (x ? " " : "") << values(x, y);
    out << '\n';
  }
}

Psf read_psf_file(const std::filesystem::path& path, int scale) {
  try {
    return Psf::normalized(read_matrix_file(path), scale);
  } catch (const DomainError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_psf_file(const std::filesystem::path& path, const Psf& psf) { write_matrix_file(path, psf.kernel()); }

std::map<int, Psf> read_psf_bank(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw FormatError(dir.string() + " is not a directory");
  static const std::regex name(R"(psf_([+-]?\d+)\.txt)");
  std::map<int, Psf> bank;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string file = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_match(file, m, name)) continue;
    const int s = std::stoi(m[1].str());
    if (s == 0) throw FormatError(entry.path().string() + ": scale 0 is undefined");
    if (!bank.emplace(s, read_psf_file(entry.path(), s)).second) {
      throw FormatError(dir.string() + ": duplicate scale " + std::to_string(s));
    }
  }
  if (bank.empty()) throw EmptyInputError(dir.string() + ": no psf_<s>.txt files");
  return bank;
}

void write_psf_bank(const std::filesystem::path& dir, const std::map<int, Psf>& bank) {
  std::filesystem::create_directories(dir);
  for (const auto& [s, psf] : bank) write_psf_file(dir / ("psf_" + std::to_string(s) + ".txt"), psf);
}

}  // namespace apf
