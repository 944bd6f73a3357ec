#pragma once

#include "ssmri/tensor.hpp"

namespace ssmri {

bool is_pow2(int n);

// Centered orthonormal 2D DFT on 2×H×W real/imag tensors. DC lands at
// (H/2, W/2); both directions scale by 1/sqrt(H·W), so the transform is
// unitary and ifft2_centered(fft2_centered(x)) == x up to roundoff.
// H and W must be powers of two.
Tensor fft2_centered(const Tensor& img);
Tensor ifft2_centered(const Tensor& ksp);

}  // namespace ssmri
