#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace gcclab::fft {

using cplx = std::complex<double>;

// Unnormalized in-place DFTs of an ny-by-nx row-major array (ny == 1 for 1D).
// forward uses exp(-i...), backward exp(+i...); backward(forward(x)) = nx*ny*x.
void forward(std::vector<cplx>& data, std::size_t nx, std::size_t ny);
void backward(std::vector<cplx>& data, std::size_t nx, std::size_t ny);

}  // namespace gcclab::fft
