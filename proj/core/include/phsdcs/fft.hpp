#pragma once

#include <cstddef>
#include <span>

#include "phsdcs/core.hpp"

namespace phsdcs::fft {

// Unitary DFTs (1/sqrt(n) on both directions). Forward uses e^{-2 pi i k n / N}.
// Sizes must be powers of two.

/// In-place 1-D transform of every row of a row-major (rows x cols) buffer.
void rows(std::span<cplx> data, std::size_t rows, std::size_t cols, bool inverse);

/// In-place 2-D transform of a row-major (rows x cols) buffer.
void grid2d(std::span<cplx> data, std::size_t rows, std::size_t cols, bool inverse);

}  // namespace phsdcs::fft
