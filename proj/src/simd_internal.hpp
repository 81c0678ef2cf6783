#pragma once

#include "dyadic/simd.hpp"

namespace dyadic::simd::detail {

// Null when the instruction set is not compiled in or not supported by the CPU.
const Kernels* avx2_kernels();
const Kernels* neon_kernels();

}  // namespace dyadic::simd::detail
