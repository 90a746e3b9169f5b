#include "aperture_forge/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

namespace apf {

namespace {

Plane clamp_checked(Plane values) {
  if (values.width() < 1 || values.height() < 1) throw DimensionError("image must be at least 1x1");
  for (double& v : values.values()) {
    if (!std::isfinite(v)) throw DomainError("non-finite image value");
    v = std::clamp(v, 0.0, 1.0);
  }
  return values;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

int parse_positive(const std::string& token, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size() || v <= 0) throw FormatError("");
    return v;
  } catch (const std::exception&) {
    throw FormatError(std::string("PGM: bad ") + what + " '" + token + "'");
  }
}

}  // namespace

Image::Image(int width, int height, double fill) : values_(clamp_checked(Plane(width, height, fill))) {}

Image::Image(Plane values) : values_(clamp_checked(std::move(values))) {}

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5") throw FormatError(path.string() + ": not a P2/P5 PGM");
  const int w = parse_positive(next_token(in), "width");
  const int h = parse_positive(next_token(in), "height");
  const int maxval = parse_positive(next_token(in), "maxval");
  if (maxval > 65535) throw FormatError(path.string() + ": maxval above 65535");

  Plane values(w, h);
  if (magic == "P2") {
    for (double& v : values.values()) {
      const std::string tok = next_token(in);
      if (tok.empty()) throw FormatError(path.string() + ": truncated pixel data");
      int raw = 0;
      try {
        raw = std::stoi(tok);
      } catch (const std::exception&) {
        throw FormatError(path.string() + ": bad pixel '" + tok + "'");
      }
      if (raw < 0 || raw > maxval) throw FormatError(path.string() + ": pixel out of range");
      v = static_cast<double>(raw) / maxval;
    }
  } else {
    const int bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> buf(values.size() * bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
      throw FormatError(path.string() + ": truncated pixel data");
    }
    auto out = values.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
      const int raw = bytes == 1 ? buf[i] : (buf[2 * i] << 8) | buf[2 * i + 1];
      if (raw > maxval) throw FormatError(path.string() + ": pixel out of range");
      out[i] = static_cast<double>(raw) / maxval;
    }
  }
  return Image(std::move(values));
}

void write_pgm(const std::filesystem::path& path, const Image& image, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw ConfigError("PGM bit depth must be 8 or 16");
  const int maxval = bit_depth == 8 ? 255 : 65535;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "P5\n" << image.width() << ' ' << image.height() << '\n' << maxval << '\n';
  std::vector<unsigned char> buf;
  buf.reserve(image.plane().size() * (bit_depth / 8));
  for (double v : image.plane().values()) {
    const auto q = static_cast<unsigned>(std::lround(v * maxval));
    if (bit_depth == 16) buf.push_back(static_cast<unsigned char>(q >> 8));
    buf.push_back(static_cast<unsigned char>(q & 0xff));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

Image crop(const Image& image, int x0, int y0, int w, int h) {
  return Image(crop(image.plane(), x0, y0, w, h));
}

double rmse(const Plane& a, const Plane& b) {
  if (!a.same_shape(b)) throw DimensionError("rmse: shape mismatch");
  if (a.empty()) return 0.0;
  double acc = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) acc += (av[i] - bv[i]) * (av[i] - bv[i]);
  return std::sqrt(acc / static_cast<double>(av.size()));
}

}  // namespace apf
