#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace winsim::detail {

/// In-place complex DFT (FFTW, estimate planning). Forward uses e^{-j 2 pi k n / N};
/// inverse is scaled by 1/N so inverse(forward(x)) == x.
void fft_forward(std::vector<std::complex<double>>& data);
void fft_inverse(std::vector<std::complex<double>>& data);

/// Smallest n >= min_size that is a multiple of `multiple` and whose
/// quotient has only factors 2, 3, 5.
std::size_t fast_fft_size(std::size_t min_size, std::size_t multiple);

/// Signed frequency of bin k for an N-point transform with sample spacing dt.
double bin_frequency(std::size_t k, std::size_t n, double dt);

}  // namespace winsim::detail
