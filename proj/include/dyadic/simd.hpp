#pragma once

// Data-parallel inner loops of the interval scans.
//
// Every kernel set produces bit-identical results: element-wise kernels use
// only correctly rounded operations (no fused multiply-add), and reductions
// use a fixed four-lane order, ((l0 + l1) + (l2 + l3)) + tail, whatever the
// vector width.

#include <cstddef>
#include <string>
#include <vector>

namespace dyadic::simd {

struct Kernels {
  const char* name;

  /// out[i] = (num[i] - num0) / (den[i] - den0)
  void (*ratio_row)(const double* num, const double* den, double num0, double den0, double* out, std::size_t n);

  /// acc[i] = max(acc[i], v[i])
  void (*max_into)(double* acc, const double* v, std::size_t n);

  /// acc[i] = max(acc[i], value)
  void (*max_broadcast)(double* acc, double value, std::size_t n);

  /// sum over i of w[i] * |v[i] - m|
  double (*abs_dev_sum)(const double* v, const double* w, double m, std::size_t n);

  /// sum over i of w[i] * (v[i] - m)^2
  double (*sq_dev_sum)(const double* v, const double* w, double m, std::size_t n);
};

const Kernels& scalar_kernels();

/// Kernel sets usable on this machine, scalar first.
std::vector<const Kernels*> available();

/// The active set: the widest available, unless DYADIC_SIMD names another
/// ("scalar", "avx2", "neon").
const Kernels& active();

/// Overrides the active set; throws std::invalid_argument for unknown or
/// unsupported names.
void select(const std::string& name);

}  // namespace dyadic::simd
