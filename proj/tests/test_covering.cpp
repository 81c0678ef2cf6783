#include "doctest.h"

#include <random>

#include "dyadic/covering.hpp"

using namespace dyadic;

namespace {

const Domain kTorus = Domain::torus(6);
const std::vector<ExactRational> kDeltas = {ExactRational(1, 3), ExactRational(1, 5), ExactRational(2, 5),
                                            ExactRational(1, 7)};

ArbitraryInterval arc(long l, long len, int level, const Domain& dom) {
  return ArbitraryInterval{ExactRational::dyadic(l, level), ExactRational::dyadic(len, level), dom};
}

bool covers(const Domain& dom, const Interval& i, const ArbitraryInterval& q) {
  return contains(dom, i.left, i.length.to_rational(), q.left, q.length);
}

// Length of the largest grid interval (standard or shifted, levels 0..L) inside q.
ExactRational brute_inner_length(const ArbitraryInterval& q, const ExactRational& delta) {
  const Domain& dom = q.domain;
  for (int n = 0; n <= dom.finest; ++n) {
    for (const GridSpec& g : {GridSpec::standard(dom), GridSpec::shifted(delta, dom)}) {
      for (const IntervalId& id : resident_intervals(g, n)) {
        const Interval i = interval(id);
        if (contains(dom, q.left, q.length, i.left, i.length.to_rational())) return i.length.to_rational();
      }
    }
  }
  return ExactRational(0);
}

}  // namespace

TEST_CASE("cover examples") {
  const Cover a = cover(ArbitraryInterval{ExactRational(2, 5), ExactRational(1, 10), kTorus}, ExactRational(1, 3));
  CHECK(a.id.grid.family == Family::Standard);
  CHECK(a.id.level == 1);
  CHECK(a.id.index == 0);
  CHECK(a.ratio == ExactRational(5));

  const Cover b = cover(ArbitraryInterval{ExactRational(3, 10), ExactRational(1, 10), kTorus}, ExactRational(1, 3));
  CHECK(b.id.grid.family == Family::Standard);
  CHECK(interval(b.id).left == ExactRational(0));
  CHECK(b.ratio == ExactRational(5));

  const Cover c = cover(ArbitraryInterval{ExactRational(0), ExactRational(1), kTorus}, ExactRational(1, 5));
  CHECK(c.id.level == 0);
  CHECK(c.ratio == ExactRational(1));

  CHECK_THROWS_AS(cover(ArbitraryInterval{ExactRational(0), ExactRational(1, 4), kTorus}, ExactRational(1, 2)),
                  DomainError);
}

TEST_CASE("cover is sound on every aligned arc") {
  for (const ExactRational& delta : kDeltas) {
    const Shift s = Shift::make(delta);
    const long n_cells = 1L << kTorus.finest;
    for (long l = 0; l < n_cells; ++l) {
      for (long len = 1; len <= n_cells; ++len) {
        const ArbitraryInterval q = arc(l, len, kTorus.finest, kTorus);
        const Cover c = cover(q, s);
        const Interval i = interval(c.id);
        REQUIRE(covers(kTorus, i, q));
        REQUIRE(c.ratio == i.length.to_rational() / q.length);
        REQUIRE(c.ratio <= s.covering);
      }
    }
  }
}

TEST_CASE("cover on the line including large scales") {
  const Domain line = Domain::line(6, 4);
  std::mt19937_64 rng(5);
  for (const ExactRational& delta : kDeltas) {
    const Shift s = Shift::make(delta);
    for (int t = 0; t < 2000; ++t) {
      const long num = std::uniform_int_distribution<long>(-4000, 4000)(rng);
      const long len = std::uniform_int_distribution<long>(1, 3000)(rng);
      const ArbitraryInterval q{ExactRational(num, 37), ExactRational(len, 41), line};
      const Cover c = cover(q, s);
      const Interval i = interval(c.id);
      REQUIRE(covers(line, i, q));
      REQUIRE(c.ratio <= s.covering);
    }
  }
}

TEST_CASE("inner examples and bound") {
  const ExactRational third(1, 3);
  const Cover a = inner(ArbitraryInterval{ExactRational(0), ExactRational(1, 2), kTorus}, third);
  CHECK(interval(a.id).left == ExactRational(0));
  CHECK(a.ratio == ExactRational(1));

  const Cover b = inner(ArbitraryInterval{ExactRational(2, 5), ExactRational(1, 2), kTorus}, third);
  CHECK(b.id.grid.family == Family::Standard);
  CHECK(interval(b.id).left == ExactRational(1, 2));
  CHECK(b.ratio == ExactRational(1, 2));

  const ArbitraryInterval q3{ExactRational(3, 10), ExactRational(3, 10), kTorus};
  const Cover c = inner(q3, third);
  CHECK(c.ratio >= Shift::make(third).distance / ExactRational(4));
  CHECK(c.ratio * q3.length == brute_inner_length(q3, third));

  for (const ExactRational& delta : kDeltas) {
    const Shift s = Shift::make(delta);
    const long n_cells = 1L << kTorus.finest;
    for (long l = 0; l < n_cells; ++l) {
      for (long len = 4; len <= n_cells; ++len) {
        const ArbitraryInterval q = arc(l, len, kTorus.finest, kTorus);
        const Cover r = inner(q, s);
        const Interval i = interval(r.id);
        REQUIRE(contains(kTorus, q.left, q.length, i.left, i.length.to_rational()));
        REQUIRE(r.ratio >= s.distance / ExactRational(4));
        if (len < n_cells) REQUIRE(i.length.to_rational() == brute_inner_length(q, delta));
      }
    }
  }
}

TEST_CASE("two adjacent dyadic intervals") {
  const Domain line = Domain::line(4, 4);
  auto check_pair = [&](const ArbitraryInterval& k) {
    const auto [j1, j2] = two_dyadic_cover(k);
    const Interval a = interval(j1);
    const Interval b = interval(j2);
    const ExactRational len = a.length.to_rational();
    CHECK(b.left == a.right());
    CHECK(b.length == a.length);
    CHECK(a.left <= k.left);
    CHECK(k.right() <= b.right());
    CHECK(len / ExactRational(2) < k.length);
    CHECK(k.length <= len);
    return std::pair{a, b};
  };
  const auto [a, b] = check_pair(ArbitraryInterval{ExactRational(3, 10), ExactRational(4, 5), line});
  CHECK(a.left == ExactRational(0));
  CHECK(b.left == ExactRational(1));

  // |K| = 1/2 forces length-1/2 intervals.
  const auto [c, d] = check_pair(ArbitraryInterval{ExactRational(1, 10), ExactRational(1, 2), line});
  CHECK(c.left == ExactRational(0));
  CHECK(d.left == ExactRational(1, 2));
  const auto [e, f] = check_pair(ArbitraryInterval{ExactRational(-1, 5), ExactRational(1, 2), line});
  CHECK(e.left == ExactRational(-1, 2));
  CHECK(f.left == ExactRational(0));

  std::mt19937_64 rng(9);
  for (int t = 0; t < 3000; ++t) {
    const long num = std::uniform_int_distribution<long>(-5000, 5000)(rng);
    const long len = std::uniform_int_distribution<long>(1, 5000)(rng);
    check_pair(ArbitraryInterval{ExactRational(num, 97), ExactRational(len, 89), line});
  }
}

TEST_CASE("naive translate fails where the shifted grid succeeds") {
  const Domain line = Domain::line(6, 4);
  const ExactRational delta(1, 3);
  const ArbitraryInterval q{ExactRational(-1, 10), ExactRational(1, 3) + ExactRational(1, 5), line};
  for (int depth = 0; depth <= 12; ++depth) CHECK(!cover_naive(q, delta, depth).has_value());
  const Cover c = cover(q, delta);
  CHECK(c.ratio <= ExactRational(6));

  const auto b = cover_naive(ArbitraryInterval{ExactRational(1, 8), ExactRational(1, 8), line}, delta, 6);
  REQUIRE(b.has_value());
  const Interval bi = interval(b->id);
  CHECK(bi.left <= ExactRational(1, 8));
  CHECK(ExactRational(1, 4) <= bi.right());

  const auto z = cover_naive(ArbitraryInterval{ExactRational(0), ExactRational(1, 8), line}, delta, 6);
  REQUIRE(z.has_value());
  CHECK(z->id.grid.family == Family::Standard);
  CHECK(z->ratio == ExactRational(1));
}

TEST_CASE("covering verifiers") {
  for (const ExactRational& delta : kDeltas) {
    const VerificationReport e = verify_cover_exhaustive(Domain::torus(5), delta);
    CHECK(e.pass());
    CHECK(e.checks[0].cases == 32 * 32);
    const VerificationReport n = verify_shift_necessity(Domain::line(3, 2), delta);
    CHECK(n.pass());
    CHECK(n.checks[2].cases > 100);
    const VerificationReport s = verify_separation(delta, -6, 6);
    CHECK(s.pass());
    CHECK(s.checks[0].cases == 13);
  }
  const VerificationReport third = verify_separation(ExactRational(1, 3), -6, 6);
  REQUIRE(third.checks.size() == 2);
  CHECK(third.checks[1].cases == 3);  // n = -2, -4, -6
  CHECK_THROWS_AS(verify_shift_necessity(Domain::torus(3), ExactRational(1, 3)), DomainError);
}
