#pragma once

#include <filesystem>
#include <map>

#include "aperture_forge/fft.hpp"
#include "aperture_forge/grid.hpp"
#include "aperture_forge/pattern.hpp"

namespace apf {

// Signed blur scale. |s| is the kernel side; the sign says which side of the
// focal plane the object lies on. |s| == 1 is the sharp (delta) kernel.
class BlurScale {
 public:
  explicit BlurScale(int s);
  int value() const { return s_; }
  int side() const { return s_ < 0 ? -s_ : s_; }
  bool flipped() const { return s_ < 0; }
  auto operator<=>(const BlurScale&) const = default;

 private:
  int s_;
};

// Non-negative kernel summing to one. scale is informational for kernels
// loaded from calibration banks.
class Psf {
 public:
  static constexpr double kSumTolerance = 1e-9;

  Psf(Plane kernel, int scale);
  // Divides by the sum; rejects negative, non-finite or all-zero weights.
  static Psf normalized(Plane weights, int scale);
  static Psf delta(int scale = 1);

  const Plane& kernel() const { return kernel_; }
  int scale() const { return scale_; }
  int width() const { return kernel_.width(); }
  int height() const { return kernel_.height(); }
  // Cell treated as the kernel origin: ((w - 1) / 2, (h - 1) / 2).
  int center_x() const { return (kernel_.width() - 1) / 2; }
  int center_y() const { return (kernel_.height() - 1) / 2; }

 private:
  Plane kernel_;
  int scale_;
};

// Area-weighted resampling of the 7x7 grid onto an |s| x |s| kernel; the
// kernel for s < 0 is the 180 degree rotation of the kernel for |s|.
Psf psf_from_pattern(const AperturePattern& pattern, BlurScale s);

Psf rotate180(const Psf& psf);

// Kernel spectrum with the kernel origin moved to bin (0, 0) so that
// multiplying spectra matches convolve_replicate() in the interior.
Spectrum kernel_spectrum(const Psf& psf, int w, int h);

// `<h> <w>` header then h rows of w reals.
Plane read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const Plane& values);

Psf read_psf_file(const std::filesystem::path& path, int scale);
void write_psf_file(const std::filesystem::path& path, const Psf& psf);

// Every psf_<s>.txt in `dir`, keyed by s.
std::map<int, Psf> read_psf_bank(const std::filesystem::path& dir);
void write_psf_bank(const std::filesystem::path& dir, const std::map<int, Psf>& bank);

}  // namespace apf
