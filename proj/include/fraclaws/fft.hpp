#pragma once

#include <complex>
#include <vector>

namespace fraclaws {

/// In-place radix-2 complex FFT. Size must be a power of two.
/// Forward uses the exp(-i 2 pi j k / n) convention; neither direction
/// applies a 1/n scaling.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse);

bool is_power_of_two(std::size_t n);

}  // namespace fraclaws
