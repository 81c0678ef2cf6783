#include "doctest.h"

#include <random>

#include "dyadic/exact.hpp"

using dyadic::DomainError;
using dyadic::DyadicValue;
using dyadic::ExactRational;

namespace {

// Brute-force minimum of dist(2^n x, Z) over n = 0 .. q + log2(q); the orbit of
// p/q is periodic after at most log2(q) steps with period at most q.
ExactRational brute_distance(const ExactRational& x) {
  const long q = x.denominator().get_si();
  ExactRational best(1);
  ExactRational y = x;
  for (long n = 0; n <= q + 64; ++n) {
    const ExactRational f = y.frac();
    const ExactRational d = dyadic::min(f, ExactRational(1) - f);
    if (d < best) best = d;
    y = (y * ExactRational(2)).frac();
  }
  return best;
}

}  // namespace

TEST_CASE("relative distance of the standard examples") {
  CHECK(dyadic::relative_distance(ExactRational(1, 3)) == ExactRational(1, 3));
  CHECK(dyadic::relative_distance(ExactRational(1, 5)) == ExactRational(1, 5));
  CHECK(dyadic::relative_distance(ExactRational(1, 2)).is_zero());
  CHECK(dyadic::relative_distance(ExactRational(3, 8)).is_zero());
  CHECK(dyadic::relative_distance(ExactRational(2, 5)) == ExactRational(1, 5));
  CHECK(dyadic::relative_distance(ExactRational(1, 7)) == ExactRational(1, 7));
  CHECK(dyadic::relative_distance(ExactRational(1, 6)) == ExactRational(1, 6));
}

TEST_CASE("covering constant") {
  CHECK(dyadic::covering_constant(ExactRational(1, 3)) == ExactRational(6));
  CHECK(dyadic::covering_constant(ExactRational(1, 5)) == ExactRational(10));
  CHECK_THROWS_AS(dyadic::covering_constant(ExactRational(1, 2)), DomainError);
  CHECK_THROWS_AS(dyadic::relative_distance(ExactRational(0)), DomainError);
  CHECK_THROWS_AS(dyadic::relative_distance(ExactRational(1)), DomainError);
  CHECK_THROWS_AS(dyadic::relative_distance(ExactRational(-1, 3)), DomainError);
}

TEST_CASE("relative distance against brute force on fuzzed rationals") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 400; ++t) {
    const long q = std::uniform_int_distribution<long>(2, 600)(rng);
    const long p = std::uniform_int_distribution<long>(1, q - 1)(rng);
    const ExactRational x(p, q);
    const ExactRational d = dyadic::relative_distance(x);
    CAPTURE(x.str());
    CHECK(d == brute_distance(x));
    const ExactRational f = x.frac();
    CHECK(d <= dyadic::min(f, ExactRational(1) - f));
    const mpz_class& den = x.denominator();
    const bool dyadic_den = mpz_popcount(den.get_mpz_t()) == 1;
    if (!dyadic_den) CHECK(d >= ExactRational(1) / ExactRational(den));
    if (dyadic_den) CHECK(d.is_zero());
  }
}

TEST_CASE("floor, frac, floor_log2, dyadic") {
  CHECK(ExactRational(-7, 2).floor() == -4);
  CHECK(ExactRational(-7, 2).ceil() == -3);
  CHECK(ExactRational(-7, 2).frac() == ExactRational(1, 2));
  CHECK(ExactRational(1, 3).floor_log2() == -2);
  CHECK(ExactRational(1, 4).floor_log2() == -2);
  CHECK(ExactRational(5).floor_log2() == 2);
  CHECK(ExactRational(8).floor_log2() == 3);
  CHECK(ExactRational::dyadic(3, 2) == ExactRational(3, 4));
  CHECK(ExactRational::dyadic(3, -2) == ExactRational(12));
  CHECK(ExactRational::parse("-6/8") == ExactRational(-3, 4));
  CHECK(ExactRational::parse("5") == ExactRational(5));
  CHECK_THROWS_AS(ExactRational::parse("1/0"), DomainError);
  CHECK_THROWS_AS(ExactRational::parse("x"), DomainError);
  CHECK(ExactRational(2, 6).str() == "1/3");
}

TEST_CASE("dyadic values are canonical") {
  const DyadicValue v(12, 4);  // 12/16 = 3/4
  CHECK(v.mantissa() == 3);
  CHECK(v.scale() == 2);
  CHECK(v.to_rational() == ExactRational(3, 4));
  CHECK(DyadicValue::from_rational(ExactRational(5, 8)) == DyadicValue(5, 3));
  CHECK_THROWS_AS(DyadicValue::from_rational(ExactRational(1, 3)), DomainError);
  CHECK(DyadicValue(0, 9) == DyadicValue(0, 0));
}
