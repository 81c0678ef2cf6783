#include "doctest.h"

#include <cmath>
#include <cstring>
#include <set>

#include "dyadic/mesh.hpp"
#include "dyadic/random.hpp"
#include "dyadic/weights.hpp"

using namespace dyadic;

namespace {

ArbitraryInterval iv(const ExactRational& left, const ExactRational& len, const Domain& d) {
  return ArbitraryInterval{left, len, d};
}

// Mean over an aligned arc by walking the cells one at a time.
double slow_average(const std::vector<double>& v, std::size_t first, std::size_t count) {
  double s = 0.0;
  for (std::size_t t = 0; t < count; ++t) s += v[(first + t) % v.size()];
  return s / static_cast<double>(count);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("averages of the step function") {
  const Domain t2 = Domain::torus(2);
  const MeshFunction1D step = MeshFunction1D::make(t2, {2.0, 2.0, 1.0, 1.0});
  CHECK(average(step, iv(ExactRational(1, 4), ExactRational(1, 2), t2)) == 1.5);
  CHECK(average(step, iv(ExactRational(3, 4), ExactRational(1, 2), t2)) == 1.5);
  const MeshFunction1D c = MeshFunction1D::make(t2, {0.3, 0.3, 0.3, 0.3});
  CHECK(average(c, iv(ExactRational(1, 2), ExactRational(3, 4), t2)) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(average(step, iv(ExactRational(1, 3), ExactRational(1, 4), t2)), DomainError);
  CHECK_THROWS_AS(MeshFunction1D::make(t2, {1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(MeshWeight1D::make(t2, {1.0, 2.0, 0.0, 1.0}), DomainError);
}

TEST_CASE("weight measures") {
  const Domain t1 = Domain::torus(1);
  const MeshWeight1D one = MeshWeight1D::make(t1, {1.0, 1.0});
  CHECK(weight_measure(one, iv(ExactRational(0), ExactRational(1, 2), t1)) == 0.5);
  const MeshWeight1D step = MeshWeight1D::make(t1, {2.0, 1.0});
  CHECK(weight_measure(step, iv(ExactRational(0), ExactRational(1), t1)) == 1.5);
  CHECK(weight_measure(step, iv(ExactRational(1, 2), ExactRational(1, 2), t1)) == 0.5);
  // Arbitrary endpoints: [2/5, 7/10) meets both cells.
  CHECK(weight_integral(step, iv(ExactRational(2, 5), ExactRational(3, 10), t1)) ==
        doctest::Approx(2.0 * 0.1 + 1.0 * 0.2));
  CHECK(weight_integral(step, iv(ExactRational(9, 10), ExactRational(1, 5), t1)) ==
        doctest::Approx(1.0 * 0.1 + 2.0 * 0.1));
}

TEST_CASE("averages agree with a cell walk, are linear, and split over unions") {
  const Domain t = Domain::torus(5);
  Rng rng(17);
  std::vector<double> a(t.cells());
  std::vector<double> b(t.cells());
  for (auto& x : a) x = rng.uniform(-3.0, 3.0);
  for (auto& x : b) x = rng.uniform(-3.0, 3.0);
  const MeshFunction1D f = MeshFunction1D::make(t, a);
  const MeshFunction1D g = MeshFunction1D::make(t, b);
  std::vector<double> ab(t.cells());
  for (std::size_t i = 0; i < ab.size(); ++i) ab[i] = 2.0 * a[i] + b[i];
  const MeshFunction1D h = MeshFunction1D::make(t, ab);
  for (int trial = 0; trial < 300; ++trial) {
    const long s = rng.integer(0, 31);
    const long n1 = rng.integer(1, 16);
    const long n2 = rng.integer(1, 16);
    const auto left = ExactRational::dyadic(s, 5);
    const auto q1 = iv(left, ExactRational::dyadic(n1, 5), t);
    const auto q2 = iv(left + ExactRational::dyadic(n1, 5), ExactRational::dyadic(n2, 5), t);
    const auto q12 = iv(left, ExactRational::dyadic(n1 + n2, 5), t);
    const double m1 = average(f, q1);
    CHECK(m1 == doctest::Approx(slow_average(a, static_cast<std::size_t>(s), static_cast<std::size_t>(n1))).epsilon(1e-12));
    const double mixed = (static_cast<double>(n1) * m1 + static_cast<double>(n2) * average(f, q2)) /
                         static_cast<double>(n1 + n2);
    CHECK(average(f, q12) == doctest::Approx(mixed).epsilon(1e-12));
    CHECK(average(h, q12) == doctest::Approx(2.0 * average(f, q12) + average(g, q12)).epsilon(1e-12));
  }
}

TEST_CASE("enumerated interval counts") {
  CHECK(enumerate_intervals(Domain::torus(1), DyadicValue::pow2(1)).size() == 3);
  CHECK(enumerate_intervals(Domain::torus(2), DyadicValue::pow2(2)).size() == 13);
  CHECK(enumerate_intervals(Domain::line(0, 1), DyadicValue::pow2(1)).size() == 10);
  for (int lv = 1; lv <= 6; ++lv) {
    const std::size_t n = std::size_t{1} << lv;
    CHECK(enumerate_intervals(Domain::torus(lv), DyadicValue::pow2(lv)).size() == n * (n - 1) + 1);
  }
  // Each aligned arc exactly once: distinct (left, length) pairs.
  const auto all = enumerate_intervals(Domain::torus(4), DyadicValue::pow2(4));
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& x : all) seen.insert({x.left.str(), x.length.str()});
  CHECK(seen.size() == all.size());
  // Longer minimum length drops the short arcs.
  CHECK(enumerate_intervals(Domain::torus(3), DyadicValue::pow2(1)).size() == 8 * 4 + 1);
}

TEST_CASE("refined partition places both grids on breakpoints") {
  const Domain t = Domain::torus(4);
  const Partition p = Partition::refined(t, ExactRational(1, 3));
  CHECK(p.size() == 32);
  CHECK(p.stride() == 2);
  double total = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) total += p.lengths()[j];
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t j = 0; j < p.size(); ++j) {
    REQUIRE(p.index_of(p.point(j)) == j);
    CHECK(p.coords()[j] == doctest::Approx(p.point(j).to_double()).epsilon(1e-15));
  }
  for (int n = 0; n <= 4; ++n) {
    for (const GridSpec& g : {GridSpec::standard(t), GridSpec::shifted(ExactRational(1, 3), t)}) {
      const auto spans = p.grid_spans(g, n);
      CHECK(spans.size() == (std::size_t{1} << n));
      for (const Span& s : spans) {
        CHECK(s.span == (std::size_t{2} << (4 - n)));
        CHECK(p.length(s) == doctest::Approx(std::ldexp(1.0, -n)).epsilon(1e-14));
      }
    }
  }
  CHECK_THROWS_AS(Partition::mesh(t).grid_spans(GridSpec::shifted(ExactRational(1, 3), t), 2), DomainError);
  const Span s = p.locate(iv(ExactRational(15, 16), ExactRational(1, 8), t));
  CHECK(s.start == 30);
  CHECK(s.span == 4);
  const Span whole = p.locate(iv(ExactRational(1, 16), ExactRational(1), t));
  CHECK(whole.span == 32);
}

TEST_CASE("prefix tables integrate over the partition") {
  const Domain t = Domain::torus(3);
  const Partition p = Partition::refined(t, ExactRational(2, 5));
  std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8};
  const PrefixTable pt(p, v);
  const MeshWeight1D w = MeshWeight1D::make(t, v);
  for (std::size_t a = 0; a < p.size(); ++a) {
    for (std::size_t n = 1; n <= p.size(); ++n) {
      const ArbitraryInterval q = p.interval(Span{a, n});
      CHECK(pt.integral(a, a + n) == doctest::Approx(weight_integral(w, q)).epsilon(1e-13));
    }
  }
}

TEST_CASE("json and csv round trips are bit exact") {
  Rng rng(23);
  for (const Domain& d : {Domain::torus(6), Domain::line(1, 3)}) {
    std::vector<double> v(d.cells());
    for (auto& x : v) x = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.integer(-300, 300)));
    v[0] = 0.1;
    v[1] = 5e-324;
    const MeshFunction1D f = MeshFunction1D::make(d, v);
    const MeshFunction1D g = function_from_json(to_json(f));
    const MeshFunction1D h = function_from_csv(to_csv(f));
    CHECK(g.domain == d);
    CHECK(h.domain == d);
    for (std::size_t i = 0; i < v.size(); ++i) {
      REQUIRE(same_bits(g.values[i], v[i]));
      REQUIRE(same_bits(h.values[i], v[i]));
    }
  }
  const Domain a = Domain::torus(2);
  std::vector<double> v2(16);
  for (std::size_t i = 0; i < v2.size(); ++i) v2[i] = 1.0 / static_cast<double>(i + 3);
  const MeshFunction2D f2 = MeshFunction2D::make(a, a, v2);
  const MeshFunction2D g2 = function2d_from_json(to_json(f2));
  for (std::size_t i = 0; i < v2.size(); ++i) REQUIRE(same_bits(g2.values[i], v2[i]));
  CHECK_THROWS_AS(function_from_json("{\"domain\": {\"kind\": \"torus\", \"L\": 2}, \"values\": [1]}"), DomainError);
  CHECK_THROWS_AS(function_from_json("not json"), DomainError);
}

TEST_CASE("comparable averages") {
  const Domain t1 = Domain::torus(1);
  const Shift third = Shift::make(ExactRational(1, 3));
  const MeshWeight1D one = MeshWeight1D::make(t1, {1.0, 1.0});
  const auto r1 = comparable_averages_check(one, third, iv(ExactRational(3, 10), ExactRational(1, 5), t1), 2.0);
  CHECK(r1.pass);
  CHECK(r1.avg_q == doctest::Approx(r1.avg_i));

  const MeshWeight1D step = MeshWeight1D::make(t1, {2.0, 1.0});
  const double cdy = std::max(dyadic_doubling(step, GridSpec::standard(t1), 8),
                              dyadic_doubling(step, GridSpec::shifted(third.delta, t1), 8));
  const auto r2 = comparable_averages_check(step, third, iv(ExactRational(2, 5), ExactRational(1, 10), t1), cdy);
  CHECK(r2.pass);
  CHECK(r2.slack >= 0.0);

  // Cascade weight against every aligned arc of the refined family.
  const Domain t = Domain::torus(6);
  for (const ExactRational& delta : {ExactRational(1, 3), ExactRational(2, 5)}) {
    const Shift s = Shift::make(delta);
    const MeshWeight1D w = generate_dyadic_doubling(4, t, 3.0);
    const int depth = t.finest + static_cast<int>(std::ceil(std::log2(s.covering_value()))) + 3;
    const double c = std::max(dyadic_doubling(w, GridSpec::standard(t), depth),
                              dyadic_doubling(w, GridSpec::shifted(delta, t), depth));
    const Partition p = Partition::refined(t, delta);
    for (std::size_t a = 0; a < p.size(); ++a) {
      for (std::size_t n = 2; n <= p.size(); ++n) {
        const auto r = comparable_averages_check(w, s, p.interval(Span{a, n}), c);
        REQUIRE(r.pass);
      }
    }
  }
}
