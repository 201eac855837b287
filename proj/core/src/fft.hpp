#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qpbeam::detail {

using cplx = std::complex<double>;

/// Smallest 2,3,5,7-smooth integer >= n.
int next_smooth_size(int n);

/// Unnormalized in-place multi-dimensional DFT over a row-major array.
/// sign = +1 synthesizes values sum_k c_k e^{+i k x}; sign = -1 analyzes.
void fft_inplace(std::span<cplx> data, std::span<const int> dims, int sign);

}  // namespace qpbeam::detail
