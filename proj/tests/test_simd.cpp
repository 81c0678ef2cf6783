#include "doctest.h"

#include <cstring>
#include <stdexcept>
#include <vector>

#include "dyadic/random.hpp"
#include "dyadic/simd.hpp"

using namespace dyadic;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::vector<double> draw(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("every kernel set matches the scalar reference bit for bit") {
  const simd::Kernels& ref = simd::scalar_kernels();
  Rng rng(3);
  for (const simd::Kernels* k : simd::available()) {
    CAPTURE(k->name);
    for (std::size_t n = 0; n < 70; ++n) {
      const auto num = draw(rng, n, -5.0, 5.0);
      auto den = draw(rng, n, 1.0, 9.0);
      const double num0 = rng.uniform(-1.0, 1.0);
      const double den0 = rng.uniform(-0.5, 0.5);
      std::vector<double> a(n);
      std::vector<double> b(n);
      ref.ratio_row(num.data(), den.data(), num0, den0, a.data(), n);
      k->ratio_row(num.data(), den.data(), num0, den0, b.data(), n);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(same_bits(a[i], b[i]));

      auto acc1 = draw(rng, n, 0.0, 1.0);
      auto acc2 = acc1;
      ref.max_into(acc1.data(), num.data(), n);
      k->max_into(acc2.data(), num.data(), n);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(same_bits(acc1[i], acc2[i]));
      ref.max_broadcast(acc1.data(), 0.5, n);
      k->max_broadcast(acc2.data(), 0.5, n);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(same_bits(acc1[i], acc2[i]));

      const double m = rng.uniform(-1.0, 1.0);
      REQUIRE(same_bits(ref.abs_dev_sum(num.data(), den.data(), m, n), k->abs_dev_sum(num.data(), den.data(), m, n)));
      REQUIRE(same_bits(ref.sq_dev_sum(num.data(), den.data(), m, n), k->sq_dev_sum(num.data(), den.data(), m, n)));
    }
  }
}

TEST_CASE("reference kernels compute what they document") {
  const simd::Kernels& k = simd::scalar_kernels();
  const double v[5] = {1.0, -2.0, 3.0, 0.5, 4.0};
  const double w[5] = {1.0, 1.0, 2.0, 4.0, 0.25};
  CHECK(k.abs_dev_sum(v, w, 1.0, 5) == doctest::Approx(0.0 + 3.0 + 4.0 + 2.0 + 0.75));
  CHECK(k.sq_dev_sum(v, w, 1.0, 5) == doctest::Approx(0.0 + 9.0 + 8.0 + 1.0 + 2.25));
  double out[2];
  const double num[2] = {3.0, 5.0};
  const double den[2] = {2.0, 3.0};
  k.ratio_row(num, den, 1.0, 1.0, out, 2);
  CHECK(out[0] == 2.0);
  CHECK(out[1] == 2.0);
}

TEST_CASE("kernel selection") {
  const std::string before = simd::active().name;
  simd::select("scalar");
  CHECK(std::string(simd::active().name) == "scalar");
  CHECK_THROWS_AS(simd::select("no-such-isa"), std::invalid_argument);
  simd::select(before);
}
