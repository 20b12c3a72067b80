#pragma once

#include <cstddef>

#include "navrec/types.hpp"

namespace navrec {

// Centered, unitary 2-D DFT pair on an H x W grid (row-major). "Centered"
// means both image and frequency indices are taken relative to the grid
// center (H/2, W/2): fftshift conventions on both sides. Sizes must be powers
// of two (DimensionError otherwise). in and out may alias.
// forward kernel: exp(-j 2*pi*k*u/N), scaled by 1/sqrt(H*W); inverse is the
// exact conjugate transpose.
void fft2_centered(const cd* in, cd* out, std::size_t H, std::size_t W, bool inverse);

// Same transforms without any normalization: forward is the plain DFT sum and
// "inverse" is its exact adjoint (conjugate kernel, no 1/N). The gridding code
// folds all scale factors into its deapodization, so it wants the raw pair.
void fft2_centered_raw(const cd* in, cd* out, std::size_t H, std::size_t W, bool inverse);

// Centered, unitary 1-D DFT pair (power-of-two n).
void fft1_centered(const cd* in, cd* out, std::size_t n, bool inverse);

}  // namespace navrec
