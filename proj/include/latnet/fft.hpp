#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace latnet {

using Complex = std::complex<double>;

bool is_power_of_two(std::size_t n);

// In-place iterative radix-2 transform; the length must be a power of two.
// Forward: X_r = sum_k x_k e^{-2 pi i k r / n}. The inverse includes 1/n.
void fft_inplace(std::vector<Complex>& data, bool inverse = false);

std::vector<Complex> fft_pow2(std::vector<Complex> data);
std::vector<Complex> ifft_pow2(std::vector<Complex> data);

}  // namespace latnet
