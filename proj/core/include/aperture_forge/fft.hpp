#pragma once

#include "aperture_forge/grid.hpp"
#include "aperture_forge/image.hpp"

namespace apf {

// Unnormalized 2D DFT bins, DC at (0, 0).
using Spectrum = ComplexPlane;

// Forward transform of `values` zero-padded (bottom/right) to pad_w x pad_h.
Spectrum dft(const Plane& values, int pad_w, int pad_h);
Spectrum dft(const Image& image, int pad_w, int pad_h);

// In-size complex transforms. inverse() applies the 1/(w*h) normalization.
Spectrum forward(const ComplexPlane& values);
ComplexPlane inverse(const Spectrum& spectrum);

// Real part of the normalized inverse transform, cropped to out_w x out_h
// (defaults to the full spectrum size).
Plane idft(const Spectrum& spectrum, int out_w = -1, int out_h = -1);

// Smallest size >= n whose prime factors are all in {2, 3, 5}.
int fft_size(int n);

}  // namespace apf
