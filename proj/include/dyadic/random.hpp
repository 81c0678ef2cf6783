#pragma once

#include <cstdint>
#include <random>

namespace dyadic {

/// Seeded generator whose draws are identical on every platform (the standard
/// distributions are implementation-defined, so they are not used).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  long integer(long lo, long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long>(g_() % span);
  }
  std::uint64_t bits() { return g_(); }

 private:
  std::mt19937_64 g_;
};

}  // namespace dyadic
