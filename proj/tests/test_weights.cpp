#include "doctest.h"

#include <chrono>
#include <cmath>

#include "dyadic/weights.hpp"

using namespace dyadic;

namespace {

const double kInfP = std::numeric_limits<double>::infinity();

// Class functional on cells [s, s + n) of the mesh, straight from the definitions.
double brute_functional(const std::vector<double>& w, std::size_t s, std::size_t n, const WeightClass& c) {
  const std::size_t cells = w.size();
  double sw = 0, sa = 0, mn = 1e300, mx = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double v = w[(s + t) % cells];
    sw += v;
    mn = std::min(mn, v);
    mx = std::max(mx, v);
    if (c.kind == WeightClass::Kind::Ap) {
      sa += c.infinite() ? std::log(v) : (c.p == 1.0 ? 0.0 : std::pow(v, -1.0 / (c.p - 1.0)));
    } else {
      sa += c.infinite() ? 0.0 : (c.p == 1.0 ? 0.0 : std::pow(v, c.p));
    }
  }
  const double m = sw / static_cast<double>(n);
  const double ma = sa / static_cast<double>(n);
  if (c.kind == WeightClass::Kind::Ap) {
    if (c.infinite()) return m * std::exp(-ma);
    if (c.p == 1.0) return m / mn;
    return m * std::pow(ma, c.p - 1.0);
  }
  if (c.infinite()) return mx / m;
  if (c.p == 1.0) {
    double e = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double u = w[(s + t) % cells] / m;
      e += u * std::log(u);
    }
    return e / static_cast<double>(n);
  }
  return std::pow(ma, 1.0 / c.p) / m;
}

double brute_continuous(const std::vector<double>& w, const WeightClass& c) {
  double best = -1e300;
  for (std::size_t s = 0; s < w.size(); ++s) {
    for (std::size_t n = 1; n <= w.size(); ++n) best = std::max(best, brute_functional(w, s, n, c));
  }
  return best;
}

// Parent/child mass ratios on the standard tree of the mesh.
double brute_std_doubling(const std::vector<double>& w) {
  std::vector<double> level = w;
  double best = 1.0;
  while (level.size() > 1) {
    std::vector<double> up(level.size() / 2);
    for (std::size_t k = 0; k < up.size(); ++k) {
      up[k] = level[2 * k] + level[2 * k + 1];
      best = std::max({best, up[k] / level[2 * k], up[k] / level[2 * k + 1]});
    }
    level = up;
  }
  return best;
}

const std::vector<WeightClass> kClasses = {WeightClass::ap(1),     WeightClass::ap(2),     WeightClass::ap(4),
                                           WeightClass::ap(kInfP), WeightClass::rh(2),     WeightClass::rh(kInfP),
                                           WeightClass::rh(1),     WeightClass::rh(3.5),   WeightClass::ap(1.5)};

}  // namespace

TEST_CASE("class tags") {
  CHECK(WeightClass::parse("a2").tag() == "a2");
  CHECK(WeightClass::parse("ainf").infinite());
  CHECK(WeightClass::parse("rh1").kind == WeightClass::Kind::RHp);
  CHECK(WeightClass::parse("doubling").kind == WeightClass::Kind::Doubling);
  CHECK(WeightClass::parse("a1.5").p == 1.5);
  CHECK_THROWS_AS(WeightClass::parse("a0.5"), DomainError);
  CHECK_THROWS_AS(WeightClass::parse("b2"), DomainError);
}

TEST_CASE("constant weight") {
  const Domain t = Domain::torus(4);
  const MeshWeight1D one = MeshWeight1D::make(t, std::vector<double>(16, 1.0));
  for (const WeightClass& c : kClasses) {
    const double expect = (c.kind == WeightClass::Kind::RHp && c.p == 1.0) ? 0.0 : 1.0;
    CHECK(class_constant(one, c, std::nullopt).value == doctest::Approx(expect).epsilon(1e-14));
  }
  CHECK(class_constant(one, WeightClass::doubling(), GridSpec::standard(t)).value == doctest::Approx(2.0));
}

TEST_CASE("step weight") {
  const Domain t1 = Domain::torus(1);
  const MeshWeight1D step = MeshWeight1D::make(t1, {2.0, 1.0});
  CHECK(class_constant(step, WeightClass::doubling(), GridSpec::standard(t1)).value == doctest::Approx(3.0));
  CHECK(class_constant(step, WeightClass::ap(1), std::nullopt).value == doctest::Approx(1.5));
  CHECK(class_constant(step, WeightClass::ap(2), std::nullopt).value == doctest::Approx(1.125));

  const Domain t4 = Domain::torus(4);
  std::vector<double> v(16, 1.0);
  for (int i = 0; i < 8; ++i) v[i] = 2.0;
  const MeshWeight1D s4 = MeshWeight1D::make(t4, v);
  const ConstantReport a2 = class_constant(s4, WeightClass::ap(2), std::nullopt);
  CHECK(a2.value == doctest::Approx(brute_continuous(v, WeightClass::ap(2))).epsilon(1e-13));
  // The A_2 maximum of a two-level step sits on an arc straddling one jump
  // with equal parts on each side.
  REQUIRE(a2.argmax_interval.has_value());
  CHECK(a2.value == doctest::Approx(1.125));
}

TEST_CASE("continuous constants agree with the brute-force scan") {
  const Domain t = Domain::torus(5);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const MeshWeight1D w = generate_dyadic_doubling(seed, t, 2.0 + static_cast<double>(seed));
    for (const WeightClass& c : kClasses) {
      CAPTURE(c.tag());
      CHECK(class_constant(w, c, std::nullopt).value ==
            doctest::Approx(brute_continuous(w.values, c)).epsilon(1e-11));
    }
    CHECK(class_constant(w, WeightClass::doubling(), GridSpec::standard(t)).value ==
          doctest::Approx(brute_std_doubling(w.values)).epsilon(1e-13));
  }
}

TEST_CASE("jensen, nesting in p and the A_2 symmetry") {
  const Domain t = Domain::torus(6);
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const MeshWeight1D w = generate_dyadic_doubling(seed, t, 4.0);
    std::vector<double> inv(w.values.size());
    for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / w.values[i];
    const MeshWeight1D wi = MeshWeight1D::make(t, inv);
    const double a1 = class_constant(w, WeightClass::ap(1), std::nullopt).value;
    const double a2 = class_constant(w, WeightClass::ap(2), std::nullopt).value;
    const double a4 = class_constant(w, WeightClass::ap(4), std::nullopt).value;
    const double ainf = class_constant(w, WeightClass::ap(kInfP), std::nullopt).value;
    CHECK(a2 >= 1.0 - 1e-9);
    CHECK(ainf >= 1.0 - 1e-9);
    CHECK(class_constant(w, WeightClass::rh(2), std::nullopt).value >= 1.0 - 1e-9);
    // Hoelder: the A_p constant does not increase with p, and A_inf is below all of them.
    CHECK(a2 <= a1 * (1 + 1e-9));
    CHECK(a4 <= a2 * (1 + 1e-9));
    CHECK(ainf <= a4 * (1 + 1e-9));
    CHECK(class_constant(wi, WeightClass::ap(2), std::nullopt).value == doctest::Approx(a2).epsilon(1e-12));
  }
}

TEST_CASE("cascade generator") {
  const Domain t = Domain::torus(4);
  const MeshWeight1D w = generate_dyadic_doubling(1, t, 3.0);
  CHECK(dyadic_doubling(w, GridSpec::standard(t), 4) <= 4.0 + 1e-12);
  const MeshWeight1D again = generate_dyadic_doubling(1, t, 3.0);
  CHECK(again.values == w.values);
  CHECK(generate_dyadic_doubling(2, t, 3.0).values != w.values);
  const MeshWeight1D flat = generate_dyadic_doubling(5, t, 1.0);
  for (double v : flat.values) CHECK(v == 1.0);
}

TEST_CASE("deep doubling scan matches exact masses") {
  // Shifted pieces below the mesh straddle at most one cell boundary; compare
  // against exact rational integration at a few levels.
  const Domain t = Domain::torus(3);
  const MeshWeight1D w = MeshWeight1D::make(t, {1, 3, 2, 5, 4, 1, 1, 2});
  const ExactRational delta(1, 3);
  const GridSpec g = GridSpec::shifted(delta, t);
  double best = 1.0;
  for (int n = 1; n <= 7; ++n) {
    for (const IntervalId& id : resident_intervals(g, n)) {
      const Interval c = interval(id);
      const Interval p = interval(parent(id));
      const double mc = weight_integral(w, ArbitraryInterval{c.left, c.length.to_rational(), t});
      const double mp = weight_integral(w, ArbitraryInterval{p.left, p.length.to_rational(), t});
      best = std::max(best, mp / mc);
    }
  }
  CHECK(dyadic_doubling(w, g, 7) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("intersection bounds on generated weights") {
  const Domain t = Domain::torus(6);
  std::vector<WeightClass> classes = kClasses;
  classes.push_back(WeightClass::doubling());
  for (const ExactRational& delta : {ExactRational(1, 3), ExactRational(1, 5), ExactRational(2, 5), ExactRational(1, 7)}) {
    const IntersectionVerifier v(t, delta);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      const MeshWeight1D w = generate_dyadic_doubling(seed * 31 + 7, t, 1.5 + static_cast<double>(seed % 4));
      const VerificationReport r = v.verify(w, classes);
      for (const Check& c : r.checks) {
        CAPTURE(c.name);
        CAPTURE(c.worst_measured);
        CAPTURE(c.worst_bound);
        CHECK(c.cases > 0);
        CHECK(c.pass());
      }
    }
  }
  const MeshWeight1D one = MeshWeight1D::make(t, std::vector<double>(64, 1.0));
  CHECK(verify_intersection(one, ExactRational(1, 3), WeightClass::ap(2)).pass());
}

TEST_CASE("rh1 and ainf") {
  const Domain t = Domain::torus(5);
  const MeshWeight1D one = MeshWeight1D::make(t, std::vector<double>(32, 1.0));
  const VerificationReport r = rh1_ainfty_relation(one);
  CHECK(r.pass());
  CHECK(r.constants.at("rh1") == doctest::Approx(0.0));
  CHECK(r.constants.at("ainf") == doctest::Approx(1.0));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CHECK(rh1_ainfty_relation(generate_dyadic_doubling(seed, t, 6.0)).pass());
  }
}
