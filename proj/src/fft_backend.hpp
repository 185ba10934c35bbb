#pragma once

#include <complex>
#include <span>

#include "cflb/signal.hpp"

namespace cflb::detail {

enum class FftDirection { forward, inverse };

/// Unnormalised in-place 2D complex transform of a row-major buffer.
void fft2_inplace(Shape shape, std::span<std::complex<double>> data, FftDirection dir);

}  // namespace cflb::detail
