#include "aperture_forge/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace apf {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per (w, h, direction) and kept for the process lifetime.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int w, int h, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(w, h, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(w) * h);
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(w) * h);
    // FFTW is row-major with the last index fastest: dims are (h, w).
    fftw_plan plan = fftw_plan_dft_2d(h, w, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

ComplexPlane execute(const ComplexPlane& in, int sign) {
  if (in.empty()) throw DimensionError("transform of an empty grid");
  ComplexPlane out(in.width(), in.height());
  fftw_plan plan = PlanCache::instance().get(in.width(), in.height(), sign);
  // std::complex<double> is layout-compatible with fftw_complex; FFTW does not
  // write to the input of an out-of-place complex transform.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.values().data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.values().data());
  fftw_execute_dft(plan, src, dst);
  return out;
}

}  // namespace

Spectrum dft(const Plane& values, int pad_w, int pad_h) {
  if (pad_w <= 0 || pad_h <= 0) throw DimensionError("dft: pad dimensions must be positive");
  if (pad_w < values.width() || pad_h < values.height()) {
    throw DimensionError("dft: pad dimensions smaller than the input");
  }
  ComplexPlane buf(pad_w, pad_h);
  for (int y = 0; y < values.height(); ++y)
    for (int x = 0; x < values.width(); ++x) buf(x, y) = values(x, y);
  return execute(buf, FFTW_FORWARD);
}

Spectrum dft(const Image& image, int pad_w, int pad_h) { return dft(image.plane(), pad_w, pad_h); }

Spectrum forward(const ComplexPlane& values) { return execute(values, FFTW_FORWARD); }

ComplexPlane inverse(const Spectrum& spectrum) {
  ComplexPlane out = execute(spectrum, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out.values()) v *= scale;
  return out;
}

Plane idft(const Spectrum& spectrum, int out_w, int out_h) {
  if (out_w < 0) out_w = spectrum.width();
  if (out_h < 0) out_h = spectrum.height();
  if (out_w > spectrum.width() || out_h > spectrum.height()) throw DimensionError("idft: crop larger than spectrum");
  const ComplexPlane full = inverse(spectrum);
  Plane out(out_w, out_h);
  for (int y = 0; y < out_h; ++y)
    for (int x = 0; x < out_w; ++x) out(x, y) = full(x, y).real();
  return out;
}

int fft_size(int n) {
  if (n < 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

}  // namespace apf
