#include "doctest.h"

#include <cmath>

#include "dyadic/haar.hpp"

using namespace dyadic;

namespace {

// Exact overlap of [a, b) with the mesh cells, summed against f; arcs on the
// torus are split at 1.
double integral_oracle(const MeshFunction1D& f, ExactRational a, ExactRational b) {
  const Domain& dom = f.domain;
  double total = 0.0;
  if (dom.is_torus()) {
    const ExactRational len = b - a;
    a = a.frac();
    b = a + len;
    if (b > ExactRational(1)) {
      return integral_oracle(f, a, ExactRational(1)) + integral_oracle(f, ExactRational(0), b - ExactRational(1));
    }
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    const ExactRational lo = dom.left() + ExactRational::dyadic(static_cast<long>(i), dom.finest);
    const ExactRational hi = lo + dom.cell_length();
    const ExactRational l = max(lo, a);
    const ExactRational r = min(hi, b);
    if (r > l) total += f.values[i] * (r - l).to_double();
  }
  return total;
}

double coeff_oracle(const MeshFunction1D& f, const IntervalId& id) {
  const Interval iv = interval(id);
  const ExactRational half = iv.length.to_rational() / ExactRational(2);
  const double l = integral_oracle(f, iv.left, iv.left + half);
  const double r = integral_oracle(f, iv.left + half, iv.right());
  return (l - r) / std::sqrt(iv.length.to_double());
}

// Direct mean oscillation over mesh cells [s, s + n).
double oscillation_oracle(const MeshFunction1D& f, std::size_t s, std::size_t n) {
  double m = 0.0;
  for (std::size_t t = 0; t < n; ++t) m += f.values[(s + t) % f.size()];
  m /= static_cast<double>(n);
  double o = 0.0;
  for (std::size_t t = 0; t < n; ++t) o += std::fabs(f.values[(s + t) % f.size()] - m);
  return o / static_cast<double>(n);
}

double continuous_oracle(const MeshFunction1D& f) {
  double best = 0.0;
  const std::size_t n = f.size();
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t longest = f.domain.is_torus() ? n : n - s;
    for (std::size_t m = 1; m <= longest; ++m) best = std::max(best, oscillation_oracle(f, s, m));
  }
  return best;
}

MeshFunction1D indicator(const Domain& dom, std::size_t first, std::size_t count) {
  std::vector<double> v(dom.cells(), 0.0);
  for (std::size_t i = first; i < first + count; ++i) v[i] = 1.0;
  return MeshFunction1D::make(dom, v);
}

const std::vector<ExactRational> kDeltas = {ExactRational(1, 3), ExactRational(1, 5), ExactRational(2, 5),
                                            ExactRational(1, 7)};

}  // namespace

TEST_CASE("haar basis function has a single coefficient") {
  const Domain t = Domain::torus(3);
  const GridSpec g = GridSpec::standard(t);
  const IntervalId top{g, 0, 0};
  const HaarCoefficients h = haar_transform(haar_function(top), g);
  for (const HaarTerm& term : h.terms) {
    CHECK(term.coeff == doctest::Approx(term.id == top ? 1.0 : 0.0));
  }
  CHECK(h.find(top)->coeff == doctest::Approx(1.0));
  CHECK(h.find(IntervalId{g, 2, 3})->id == IntervalId{g, 2, 3});
  CHECK(h.find(IntervalId{g, 3, 0}) == nullptr);
  CHECK(*h.mean == doctest::Approx(0.0));
  CHECK(h.tail == 0.0);
}

TEST_CASE("constants have no Haar coefficients") {
  const Domain t = Domain::torus(4);
  const MeshFunction1D c = MeshFunction1D::make(t, std::vector<double>(16, 2.5));
  for (const ExactRational& d : kDeltas) {
    const HaarCoefficients h = haar_transform(c, GridSpec::shifted(d, t));
    for (const HaarTerm& term : h.terms) CHECK(std::fabs(term.coeff) < 1e-14);
    CHECK(h.tail == 0.0);
    CHECK(*h.mean == doctest::Approx(2.5));
  }
}

TEST_CASE("quarter indicator coefficients") {
  const Domain t = Domain::torus(2);
  const GridSpec g = GridSpec::standard(t);
  const MeshFunction1D f = indicator(t, 0, 1);
  const HaarCoefficients h = haar_transform(f, g);
  CHECK(h.find(IntervalId{g, 0, 0})->coeff == doctest::Approx(0.25));
  CHECK(h.find(IntervalId{g, 1, 0})->coeff == doctest::Approx(std::sqrt(2.0) / 4.0));
  CHECK(h.find(IntervalId{g, 1, 1})->coeff == doctest::Approx(0.0));
  for (const HaarTerm& term : h.terms) CHECK(term.coeff == doctest::Approx(coeff_oracle(f, term.id)));
}

TEST_CASE("coefficients match exact inner products on both grids") {
  for (const Domain& dom : {Domain::torus(5), Domain::line(2, 3)}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const MeshFunction1D f = generate_finite_haar(seed, dom, 6);
      for (const ExactRational& d : kDeltas) {
        for (const GridSpec& g : {GridSpec::standard(dom), GridSpec::shifted(d, dom)}) {
          for (const HaarTerm& term : haar_transform(f, g).terms) {
            CHECK(term.coeff == doctest::Approx(coeff_oracle(f, term.id)).epsilon(1e-12).scale(1.0));
          }
        }
      }
    }
  }
}

TEST_CASE("tail energy of the shifted grid") {
  const Domain t = Domain::torus(4);
  const MeshFunction1D f = generate_finite_haar(42, t, 10);
  for (const ExactRational& d : kDeltas) {
    const double theta = d.mul_pow2(4).frac().to_double();
    const double h = 1.0 / 16.0;
    double expect = 0.0;
    for (std::size_t i = 0; i < 16; ++i) {
      const double u = f.values[i];
      const double v = f.values[(i + 1) % 16];
      expect += theta * (1.0 - theta) * h * (u - v) * (u - v);
    }
    CHECK(haar_transform(f, GridSpec::shifted(d, t)).tail == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("parseval on the torus") {
  for (int level : {1, 4, 8}) {
    const Domain t = Domain::torus(level);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const MeshFunction1D f = generate_finite_haar(seed, t, 3 * level);
      CHECK(parseval_check(f, GridSpec::standard(t)).pass());
      for (const ExactRational& d : kDeltas) CHECK(parseval_check(f, GridSpec::shifted(d, t)).pass());
    }
  }
}

TEST_CASE("bmo of simple functions") {
  const Domain t = Domain::torus(3);
  const GridSpec g = GridSpec::standard(t);
  const MeshFunction1D c = MeshFunction1D::make(t, std::vector<double>(8, -1.0));
  for (BMOMode m : {BMOMode::Avg, BMOMode::AvgP, BMOMode::Carleson}) CHECK(bmo_dyadic(c, g, m).value == 0.0);
  CHECK(bmo_continuous(c).value == 0.0);

  const MeshFunction1D h = haar_function(IntervalId{g, 0, 0});
  const BMOReport avg = bmo_dyadic(h, g, BMOMode::Avg);
  CHECK(avg.value == doctest::Approx(1.0));
  CHECK(avg.argmax_interval->length == ExactRational(1));
  const BMOReport carl = bmo_dyadic(h, g, BMOMode::Carleson);
  CHECK(carl.value == doctest::Approx(1.0));
  CHECK(carl.argmax_interval->length == ExactRational(1));
  CHECK(bmo_continuous(h).value == doctest::Approx(1.0));
  CHECK(bmo_continuous(indicator(t, 0, 4)).value == doctest::Approx(0.5));

  // The shifted grid never sees more oscillation than the continuous family.
  const BMOReport sh = bmo_dyadic(h, GridSpec::shifted(ExactRational(1, 3), t), BMOMode::Avg);
  CHECK(sh.value <= 1.0 + 1e-15);
}

TEST_CASE("continuous bmo agrees with the direct scan") {
  for (const Domain& dom : {Domain::torus(5), Domain::line(1, 3)}) {
    for (std::uint64_t seed = 3; seed <= 8; ++seed) {
      const MeshFunction1D f = generate_finite_haar(seed, dom, 5);
      const BMOReport r = bmo_continuous(f);
      CHECK(r.value == doctest::Approx(continuous_oracle(f)).epsilon(1e-12));
      CHECK(r.norm_avg <= r.norm_p2 + 1e-15);
    }
  }
}

TEST_CASE("norm relations on random finite Haar functions") {
  const Domain t = Domain::torus(6);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const MeshFunction1D f = generate_finite_haar(seed, t, 8);
    for (const ExactRational& d : kDeltas) {
      const Partition part = Partition::refined(t, d);
      for (const GridSpec& g : {GridSpec::standard(t), GridSpec::shifted(d, t)}) {
        const BMOReport r = bmo_dyadic(f, g, part, BMOMode::Avg);
        CHECK(r.norm_avg <= r.norm_p2 * (1 + 1e-12));
        CHECK(r.norm_avg <= *r.norm_carleson * (1 + 1e-9));
        CHECK(bmo_chain_check(f, g, part).pass());
      }
      const VerificationReport v = verify_bmo_intersection(f, d);
      for (const Check& c : v.checks) {
        CAPTURE(c.name);
        CHECK(c.cases > 0);
        CHECK(c.pass());
      }
    }
  }
}

TEST_CASE("bmo on the line") {
  const Domain line = Domain::line(2, 3);
  const MeshFunction1D f = generate_finite_haar(9, line, 6);
  const VerificationReport v = verify_bmo_intersection(f, ExactRational(1, 3));
  CHECK(v.pass());
  CHECK(v.constants.at("bmo.std") <= v.constants.at("bmo.continuous"));
}

TEST_CASE("projection") {
  const Domain t = Domain::torus(5);
  const GridSpec g = GridSpec::standard(t);
  const MeshFunction1D c = MeshFunction1D::make(t, std::vector<double>(32, 3.0));
  for (double v : project(c, IntervalId{g, 2, 1}).values) CHECK(v == doctest::Approx(0.0));

  const IntervalId j{g, 2, 3};
  const MeshFunction1D hj = haar_function(j);
  const MeshFunction1D p = project(hj, j);
  for (std::size_t i = 0; i < 32; ++i) CHECK(p.values[i] == doctest::Approx(hj.values[i]));

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const MeshFunction1D f = generate_finite_haar(seed, t, 12);
    const HaarCoefficients h = haar_transform(f, g);
    for (int level = 0; level <= 5; ++level) {
      for (const IntervalId& id : resident_intervals(g, level)) {
        double expect = 0.0;
        const Interval jv = interval(id);
        for (const HaarTerm& term : h.terms) {
          const Interval iv = interval(term.id);
          if (contains(t, jv.left, jv.length.to_rational(), iv.left, iv.length.to_rational())) {
            expect += term.coeff * term.coeff;
          }
        }
        CHECK(l2_norm_squared(project(f, id)) == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
      }
    }
  }
  CHECK_THROWS_AS(project(c, IntervalId{g, 6, 0}), DomainError);
  CHECK_THROWS_AS(project(c, IntervalId{GridSpec::shifted(ExactRational(1, 3), t), 1, 0}), DomainError);
}

TEST_CASE("finite Haar truncation") {
  const Domain t = Domain::torus(4);
  const MeshFunction1D h = haar_function(IntervalId{GridSpec::standard(t), 0, 0});
  for (int n = 0; n <= 5; ++n) {
    const MeshFunction1D fn = vmo_truncation(h, n);
    for (std::size_t i = 0; i < 16; ++i) CHECK(fn.values[i] == doctest::Approx(h.values[i]));
  }

  // One term at level L - 1 on [6, 6 + 1/4) of the window [-8, 8).
  const Domain line = Domain::line(3, 3);
  const GridSpec lg = GridSpec::standard(line);
  const MeshFunction1D far = haar_function(IntervalId{lg, 2, 24});
  for (int n = 0; n <= 6; ++n) {
    const MeshFunction1D fn = vmo_truncation(far, n);
    double mass = 0.0;
    for (double v : fn.values) mass += std::fabs(v);
    if (n < 3) {
      CHECK(mass == 0.0);
    } else {
      CHECK(mass > 0.0);
      for (std::size_t i = 0; i < far.size(); ++i) CHECK(fn.values[i] == doctest::Approx(far.values[i]));
    }
  }
  CHECK_THROWS_AS(vmo_truncation(far, -1), DomainError);

  // The Carleson norm of the remainder can only shrink as the window grows.
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const MeshFunction1D f = generate_finite_haar(seed, line, 10);
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= 3 + 3; ++n) {
      const MeshFunction1D fn = vmo_truncation(f, n);
      std::vector<double> rest(f.size());
      for (std::size_t i = 0; i < rest.size(); ++i) rest[i] = f.values[i] - fn.values[i];
      const double norm = bmo_dyadic(MeshFunction1D{line, rest}, lg, BMOMode::Carleson).value;
      CHECK(norm <= prev * (1 + 1e-9) + 1e-12);
      prev = norm;
    }
    CHECK(prev < 1e-12);
  }
}

TEST_CASE("generator") {
  const Domain t = Domain::torus(5);
  CHECK(generate_finite_haar(3, t, 4).values == generate_finite_haar(3, t, 4).values);
  CHECK(generate_finite_haar(3, t, 4).values != generate_finite_haar(4, t, 4).values);
  const HaarCoefficients h = haar_transform(generate_finite_haar(3, t, 4), GridSpec::standard(t));
  std::size_t nonzero = 0;
  for (const HaarTerm& term : h.terms) nonzero += std::fabs(term.coeff) > 1e-14;
  CHECK(nonzero <= 4);
}

TEST_CASE("truncation verifier") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (const Domain& d : {Domain::torus(5), Domain::line(3, 3)}) {
      const VerificationReport r = verify_truncation(generate_finite_haar(seed, d, 8));
      CHECK(r.pass());
      CHECK(r.checks[0].cases > 0);
    }
  }
}
