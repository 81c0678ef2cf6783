#include "simd_internal.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace dyadic::simd::detail {

namespace {

void ratio_row(const double* num, const double* den, double num0, double den0, double* out, std::size_t n) {
  const float64x2_t n0 = vdupq_n_f64(num0);
  const float64x2_t d0 = vdupq_n_f64(den0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t a = vsubq_f64(vld1q_f64(num + i), n0);
    const float64x2_t b = vsubq_f64(vld1q_f64(den + i), d0);
    vst1q_f64(out + i, vdivq_f64(a, b));
  }
  for (; i < n; ++i) out[i] = (num[i] - num0) / (den[i] - den0);
}

void max_into(double* acc, const double* v, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t a = vld1q_f64(acc + i);
    const float64x2_t x = vld1q_f64(v + i);
    vst1q_f64(acc + i, vbslq_f64(vcgtq_f64(x, a), x, a));
  }
  for (; i < n; ++i) acc[i] = v[i] > acc[i] ? v[i] : acc[i];
}

void max_broadcast(double* acc, double value, std::size_t n) {
  const float64x2_t x = vdupq_n_f64(value);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t a = vld1q_f64(acc + i);
    vst1q_f64(acc + i, vbslq_f64(vcgtq_f64(x, a), x, a));
  }
  for (; i < n; ++i) acc[i] = value > acc[i] ? value : acc[i];
}

// Two 2-lane accumulators hold lanes (0,1) and (2,3) of the reference order.
double abs_dev_sum(const double* v, const double* w, double m, std::size_t n) {
  const float64x2_t mv = vdupq_n_f64(m);
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(w + i), vabsq_f64(vsubq_f64(vld1q_f64(v + i), mv))));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(w + i + 2), vabsq_f64(vsubq_f64(vld1q_f64(v + i + 2), mv))));
  }
  double s = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) + (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (; i < n; ++i) s += w[i] * std::fabs(v[i] - m);
  return s;
}

double sq_dev_sum(const double* v, const double* w, double m, std::size_t n) {
  const float64x2_t mv = vdupq_n_f64(m);
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t a = vsubq_f64(vld1q_f64(v + i), mv);
    const float64x2_t b = vsubq_f64(vld1q_f64(v + i + 2), mv);
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(w + i), vmulq_f64(a, a)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(w + i + 2), vmulq_f64(b, b)));
  }
  double s = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) + (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (; i < n; ++i) {
    const double d = v[i] - m;
    s += w[i] * (d * d);
  }
  return s;
}

const Kernels kNeon{"neon", ratio_row, max_into, max_broadcast, abs_dev_sum, sq_dev_sum};

}  // namespace

const Kernels* neon_kernels() { return &kNeon; }

}  // namespace dyadic::simd::detail

#else

namespace dyadic::simd::detail {
const Kernels* neon_kernels() { return nullptr; }
}  // namespace dyadic::simd::detail

#endif
