#pragma once

#include <random>

#include "aperture_forge/image.hpp"
#include "aperture_forge/psf.hpp"

namespace apf {

using Rng = std::mt19937_64;

// True convolution with edge-replicated borders; output has the input's size.
Plane convolve_replicate(const Plane& values, const Psf& psf);

// Convolution plus zero-mean Gaussian noise of std `sigma`, clamped to [0, 1].
Image blur(const Image& image, const Psf& psf, double sigma, Rng& rng);
Image blur(const Image& image, const Psf& psf, double sigma, std::uint64_t seed);

}  // namespace apf
