#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "simd_internal.hpp"

namespace dyadic::simd {

namespace {

void ratio_row(const double* num, const double* den, double num0, double den0, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (num[i] - num0) / (den[i] - den0);
}

void max_into(double* acc, const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = v[i] > acc[i] ? v[i] : acc[i];
}

void max_broadcast(double* acc, double value, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = value > acc[i] ? value : acc[i];
}

double abs_dev_sum(const double* v, const double* w, double m, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int k = 0; k < 4; ++k) lane[k] += w[i + k] * std::fabs(v[i + k] - m);
  }
  double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) s += w[i] * std::fabs(v[i] - m);
  return s;
}

double sq_dev_sum(const double* v, const double* w, double m, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int k = 0; k < 4; ++k) {
      const double d = v[i + k] - m;
      lane[k] += w[i + k] * (d * d);
    }
  }
  double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) {
    const double d = v[i] - m;
    s += w[i] * (d * d);
  }
  return s;
}

const Kernels kScalar{"scalar", ratio_row, max_into, max_broadcast, abs_dev_sum, sq_dev_sum};

const Kernels* by_name(const std::string& name) {
  for (const Kernels* k : available()) {
    if (name == k->name) return k;
  }
  return nullptr;
}

const Kernels* initial() {
  if (const char* env = std::getenv("DYADIC_SIMD")) {
    if (const Kernels* k = by_name(env)) return k;
  }
  return available().back();
}

const Kernels*& current() {
  static const Kernels* k = initial();
  return k;
}

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

std::vector<const Kernels*> available() {
  std::vector<const Kernels*> out{&kScalar};
  if (const Kernels* k = detail::avx2_kernels()) out.push_back(k);
  if (const Kernels* k = detail::neon_kernels()) out.push_back(k);
  return out;
}

const Kernels& active() { return *current(); }

void select(const std::string& name) {
  const Kernels* k = by_name(name);
  if (k == nullptr) throw std::invalid_argument("kernel set not available: " + name);
  current() = k;
}

}  // namespace dyadic::simd
