#include "simd_internal.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

namespace dyadic::simd::detail {

namespace {

void ratio_row(const double* num, const double* den, double num0, double den0, double* out, std::size_t n) {
  const __m256d n0 = _mm256_set1_pd(num0);
  const __m256d d0 = _mm256_set1_pd(den0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_sub_pd(_mm256_loadu_pd(num + i), n0);
    const __m256d b = _mm256_sub_pd(_mm256_loadu_pd(den + i), d0);
    _mm256_storeu_pd(out + i, _mm256_div_pd(a, b));
  }
  for (; i < n; ++i) out[i] = (num[i] - num0) / (den[i] - den0);
}

void max_into(double* acc, const double* v, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // max_pd(a, b) returns b unless a > b, matching the scalar select.
    _mm256_storeu_pd(acc + i, _mm256_max_pd(_mm256_loadu_pd(v + i), _mm256_loadu_pd(acc + i)));
  }
  for (; i < n; ++i) acc[i] = v[i] > acc[i] ? v[i] : acc[i];
}

void max_broadcast(double* acc, double value, std::size_t n) {
  const __m256d x = _mm256_set1_pd(value);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(acc + i, _mm256_max_pd(x, _mm256_loadu_pd(acc + i)));
  for (; i < n; ++i) acc[i] = value > acc[i] ? value : acc[i];
}

double hsum(__m256d s) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, s);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double abs_dev_sum(const double* v, const double* w, double m, std::size_t n) {
  const __m256d mv = _mm256_set1_pd(m);
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(v + i), mv));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), d));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * std::fabs(v[i] - m);
  return s;
}

double sq_dev_sum(const double* v, const double* w, double m, std::size_t n) {
  const __m256d mv = _mm256_set1_pd(m);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v + i), mv);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(d, d)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = v[i] - m;
    s += w[i] * (d * d);
  }
  return s;
}

const Kernels kAvx2{"avx2", ratio_row, max_into, max_broadcast, abs_dev_sum, sq_dev_sum};

}  // namespace

const Kernels* avx2_kernels() { return __builtin_cpu_supports("avx2") ? &kAvx2 : nullptr; }

}  // namespace dyadic::simd::detail

#else

namespace dyadic::simd::detail {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace dyadic::simd::detail

#endif
