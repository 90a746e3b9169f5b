#include "aperture_forge/prior.hpp"

#include <algorithm>
#include <numeric>

#include "aperture_forge/fft.hpp"
#include "aperture_forge/psf.hpp"

namespace apf {

NaturalImagePrior estimate_prior(std::span<const Image> corpus, int pad_w, int pad_h) {
  if (corpus.empty()) throw EmptyInputError("estimate_prior: empty corpus");
  Plane acc(pad_w, pad_h);
  for (const Image& img : corpus) {
    const Spectrum f = dft(img, pad_w, pad_h);
    auto out = acc.values();
    auto in = f.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += std::norm(in[i]);
  }
  const double inv = 1.0 / static_cast<double>(corpus.size());
  for (double& v : acc.values()) v = std::max(v * inv, NaturalImagePrior::kFloor);
  return NaturalImagePrior{std::move(acc)};
}

NaturalImagePrior normalized_to_unit_mean(const NaturalImagePrior& prior) {
  if (prior.a.empty()) throw EmptyInputError("empty prior");
  const auto v = prior.a.values();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  NaturalImagePrior out{prior.a};
  for (double& x : out.a.values()) x = std::max(x / mean, NaturalImagePrior::kFloor);
  return out;
}

NaturalImagePrior read_prior_file(const std::filesystem::path& path) {
  Plane a = read_matrix_file(path);
  for (double& v : a.values()) {
    if (!(v >= 0.0)) throw FormatError(path.string() + ": prior entries must be non-negative");
    v = std::max(v, NaturalImagePrior::kFloor);
  }
  return NaturalImagePrior{std::move(a)};
}

void write_prior_file(const std::filesystem::path& path, const NaturalImagePrior& prior) {
  write_matrix_file(path, prior.a);
}

}  // namespace apf
