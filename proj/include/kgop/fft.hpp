#pragma once

#include <complex>
#include <cstddef>
#include <vector>

// Complex FFTs used by the unitary grid transforms and the convolution
// operators. Power-of-two lengths run iterative radix-2; everything else
// goes through Bluestein's chirp-z reduction to a power of two, so odd grid
// sizes (2K+1 points per axis) are no problem.

namespace kgop::fft {

using cplx = std::complex<double>;

// In-place transform, sign = +1 or -1 in exp(sign * 2*pi*i*jk/n). Unscaled.
void transform(std::vector<cplx>& data, int sign);

// Unscaled transform of a strided line inside a larger array.
void transform_strided(cplx* base, std::size_t n, std::size_t stride, int sign);

std::size_t next_pow2(std::size_t n);

// out = linear convolution of a and b (size a.size()+b.size()-1), via
// zero-padded power-of-two FFTs.
std::vector<cplx> convolve_linear(const std::vector<cplx>& a, const std::vector<cplx>& b);

}  // namespace kgop::fft
