#pragma once

#include <span>

#include "penudge/grid.hpp"

namespace penudge::detail {

// Level-by-level 2D transforms. Plans are created once per grid shape under a
// lock; execution is reentrant.

/// out = FFT(in) / (nx * ny)
void fft_forward(const GridSpec& g, std::span<const double> in,
                 std::span<Complex> out);
void fft_forward(const GridSpec& g, std::span<const Complex> in,
                 std::span<Complex> out);
/// out = IFFT(in), complex result.
void fft_inverse(const GridSpec& g, std::span<const Complex> in,
                 std::span<Complex> out);
/// Real part of the inverse transform; no symmetry check.
void fft_inverse_real(const GridSpec& g, std::span<const Complex> in,
                      std::span<double> out);

}  // namespace penudge::detail
