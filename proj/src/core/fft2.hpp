#pragma once

#include <complex>
#include <vector>

namespace ptcov {

// Thin wrapper around FFTW's complex 2D transforms with a process-wide plan
// cache. Plan creation is serialized; execution is safe from many threads on
// distinct buffers.
namespace fft2 {

void forward(int rows, int cols, std::complex<double>* data);   // unnormalized
void inverse(int rows, int cols, std::complex<double>* data);   // normalized by 1/(rows*cols)

}  // namespace fft2

}  // namespace ptcov
