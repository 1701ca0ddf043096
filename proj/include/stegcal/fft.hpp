#pragma once

#include <complex>
#include <span>
#include <vector>

namespace stegcal {

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

// In-place iterative radix-2 FFT; size must be a power of two.
// inverse=true computes the unscaled inverse (sign +1).
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse = false);

// Orthonormal DCT-II / DCT-III of arbitrary length (FFTW REDFT10/REDFT01).
std::vector<double> dct_ortho(std::span<const double> x);
std::vector<double> idct_ortho(std::span<const double> coeffs);

}  // namespace stegcal
