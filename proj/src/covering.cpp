#include "dyadic/covering.hpp"

#include <stdexcept>

namespace dyadic {

namespace {

void check_interval(const ArbitraryInterval& q) {
  if (q.length.sign() <= 0) throw DomainError("interval length must be positive");
  if (q.domain.is_torus() && q.length > ExactRational(1)) throw DomainError("torus arcs have length at most 1");
}

mpz_class wrap_index(const Domain& domain, mpz_class k, int level) {
  if (domain.is_torus()) {
    mpz_class count;
    mpz_ui_pow_ui(count.get_mpz_t(), 2, static_cast<unsigned long>(level));
    mpz_fdiv_r(k.get_mpz_t(), k.get_mpz_t(), count.get_mpz_t());
  }
  return k;
}

// Index of the level-n interval of `grid` that contains [a, b), if any.
// Endpoint sets are 2^-n periodic, so on the torus the arc can be treated as
// a line segment starting in [0, 1).
std::optional<mpz_class> containing_index(const GridSpec& grid, int level, const ExactRational& a,
                                          const ExactRational& b) {
  const ExactRational off = grid.offset(level);
  mpz_class k = (a - off).mul_pow2(level).floor();
  const ExactRational next = off + ExactRational::dyadic(k + 1, level);
  if (next >= b) return wrap_index(grid.domain, std::move(k), level);
  return std::nullopt;
}

// Index of the leftmost level-n interval of `grid` inside [a, b), if any.
std::optional<mpz_class> inside_index(const GridSpec& grid, int level, const ExactRational& a,
                                      const ExactRational& b) {
  const ExactRational off = grid.offset(level);
  mpz_class k = (a - off).mul_pow2(level).ceil();
  const ExactRational end = off + ExactRational::dyadic(k + 1, level);
  if (end <= b) return wrap_index(grid.domain, std::move(k), level);
  return std::nullopt;
}

IntervalId whole_circle(const Domain& domain) { return IntervalId{GridSpec::standard(domain), 0, 0}; }

}  // namespace

Cover cover(const ArbitraryInterval& q, const Shift& shift) {
  check_interval(q);
  const Domain& dom = q.domain;

  // Unique n with d 2^(-n-1) <= |Q| < d 2^-n, i.e. 2^n < d/|Q| <= 2^(n+1).
  const ExactRational t = shift.distance / q.length;
  long n = t.floor_log2();
  if (t == ExactRational::dyadic(1, static_cast<int>(-n))) --n;

  if (dom.is_torus() && n < 0) {
    return Cover{whole_circle(dom), ExactRational(1) / q.length};
  }
  const int level = static_cast<int>(n);
  const ExactRational a = dom.reduce(q.left);
  const ExactRational b = a + q.length;
  const ExactRational ratio = ExactRational::dyadic(1, level) / q.length;

  const GridSpec std_grid = GridSpec::standard(dom);
  if (auto k = containing_index(std_grid, level, a, b)) return Cover{IntervalId{std_grid, level, *k}, ratio};
  const GridSpec shifted{Family::Shifted, shift.delta, dom};
  if (auto k = containing_index(shifted, level, a, b)) return Cover{IntervalId{shifted, level, *k}, ratio};

  throw std::logic_error("cover: interval meets both endpoint sets; separation violated for delta " +
                         shift.delta.str());
}

Cover cover(const ArbitraryInterval& q, const ExactRational& delta) { return cover(q, Shift::make(delta)); }

Cover inner(const ArbitraryInterval& q, const Shift& shift) {
  check_interval(q);
  const Domain& dom = q.domain;
  if (dom.is_torus() && q.length == ExactRational(1)) return Cover{whole_circle(dom), ExactRational(1)};

  // Coarsest level whose intervals are no longer than q.
  long start = (ExactRational(1) / q.length).floor_log2();
  if (ExactRational::dyadic(1, static_cast<int>(start)) > q.length) ++start;
  if (dom.is_torus() && start < 0) start = 0;

  const ExactRational a = dom.reduce(q.left);
  const ExactRational b = a + q.length;
  const GridSpec std_grid = GridSpec::standard(dom);
  const GridSpec shifted{Family::Shifted, shift.delta, dom};
  for (long n = start; n <= dom.finest; ++n) {
    const int level = static_cast<int>(n);
    const ExactRational ratio = ExactRational::dyadic(1, level) / q.length;
    if (auto k = inside_index(std_grid, level, a, b)) return Cover{IntervalId{std_grid, level, *k}, ratio};
    if (auto k = inside_index(shifted, level, a, b)) return Cover{IntervalId{shifted, level, *k}, ratio};
  }
  throw DomainError("inner: no grid interval of length >= 2^-L fits inside the interval");
}

Cover inner(const ArbitraryInterval& q, const ExactRational& delta) { return inner(q, Shift::make(delta)); }

std::pair<IntervalId, IntervalId> two_dyadic_cover(const ArbitraryInterval& k) {
  if (k.domain.is_torus()) throw DomainError("two_dyadic_cover is defined on the line");
  check_interval(k);
  // N with 2^(N-1) < |K| <= 2^N; the intervals have level -N.
  long big_n = k.length.floor_log2();
  if (k.length != ExactRational::dyadic(1, static_cast<int>(-big_n))) ++big_n;
  const int level = static_cast<int>(-big_n);
  const GridSpec grid = GridSpec::standard(k.domain);
  const mpz_class j = k.left.mul_pow2(level).floor();
  return {IntervalId{grid, level, j}, IntervalId{grid, level, j + 1}};
}

std::optional<Cover> cover_naive(const ArbitraryInterval& q, const ExactRational& delta, int max_level_drop) {
  if (q.domain.is_torus()) throw DomainError("cover_naive is defined on the line");
  check_interval(q);
  const GridSpec std_grid = GridSpec::standard(q.domain);
  const GridSpec naive = GridSpec::naive(delta, q.domain);
  // Finest level whose intervals are at least as long as q.
  const long start = (ExactRational(1) / q.length).floor_log2();
  const ExactRational a = q.left;
  const ExactRational b = q.right();
  for (long n = start; n >= -static_cast<long>(max_level_drop); --n) {
    const int level = static_cast<int>(n);
    const ExactRational ratio = ExactRational::dyadic(1, level) / q.length;
    if (auto k = containing_index(std_grid, level, a, b)) return Cover{IntervalId{std_grid, level, *k}, ratio};
    if (auto k = containing_index(naive, level, a, b)) return Cover{IntervalId{naive, level, *k}, ratio};
  }
  return std::nullopt;
}

}  // namespace dyadic

namespace dyadic {

VerificationReport verify_cover_exhaustive(const Domain& torus, const ExactRational& delta) {
  if (!torus.is_torus()) throw DomainError("exhaustive cover check runs on the torus");
  const Shift s = Shift::make(delta);
  VerificationReport rep;
  rep.name = "cover-exhaustive";
  rep.parameters["delta"] = delta.str();
  rep.parameters["L"] = std::to_string(torus.finest);
  rep.constants["C(delta)"] = s.covering_value();
  Check& inside = rep.check("Q inside cover(Q)", true);
  Check& ratio = rep.check("|I| / |Q| <= C(delta)", true);
  const long n = 1L << torus.finest;
  for (long l = 0; l < n; ++l) {
    for (long len = 1; len <= n; ++len) {
      const ArbitraryInterval q{ExactRational::dyadic(l, torus.finest), ExactRational::dyadic(len, torus.finest), torus};
      const Cover c = cover(q, s);
      const Interval i = interval(c.id);
      auto name = [&] { return "Q = [" + q.left.str() + ", " + q.right().str() + ")"; };
      const bool ok = contains(torus, i.left, i.length.to_rational(), q.left, q.length);
      inside.record_exact(ok, ok ? 0.0 : 1.0, 0.0, name);
      ratio.record_exact(c.ratio <= s.covering, c.ratio.to_double(), s.covering_value(), name);
    }
  }
  return rep;
}

VerificationReport verify_shift_necessity(const Domain& line, const ExactRational& delta) {
  if (line.is_torus()) throw DomainError("shift necessity is checked on the line");
  const Shift s = Shift::make(delta);
  const int m = line.coarsest;
  VerificationReport rep;
  rep.name = "shift-necessity";
  rep.parameters["delta"] = delta.str();
  rep.parameters["M"] = std::to_string(m);
  rep.parameters["L"] = std::to_string(line.finest);
  Check& inside = rep.check("Q inside cover(Q)", true);
  Check& ratio = rep.check("|I| / |Q| <= C(delta)", true);
  Check& naive = rep.check("naive translate finds no cover down to level -M", true);
  const ExactRational window = ExactRational::dyadic(1, -m);
  const long cells = 1L << line.finest;
  const long lo = -(window.floor().get_si()) * cells;
  const long hi = window.floor().get_si() * cells;
  const ExactRational db = delta.mul_pow2(line.finest);
  const long first_b = db.floor().get_si() + 1;  // b > delta
  for (long a = lo; a < 0; ++a) {
    for (long b = first_b; b <= hi && b - a <= hi; ++b) {
      const ArbitraryInterval q{ExactRational::dyadic(a, line.finest), ExactRational::dyadic(b - a, line.finest), line};
      auto name = [&] { return "Q = [" + q.left.str() + ", " + q.right().str() + ")"; };
      const Cover c = cover(q, s);
      const Interval i = interval(c.id);
      const bool ok = i.left <= q.left && q.right() <= i.right();
      inside.record_exact(ok, ok ? 0.0 : 1.0, 0.0, name);
      ratio.record_exact(c.ratio <= s.covering, c.ratio.to_double(), s.covering_value(), name);
      const bool none = !cover_naive(q, delta, m).has_value();
      naive.record_exact(none, none ? 0.0 : 1.0, 0.0, name);
    }
  }
  return rep;
}

VerificationReport verify_separation(const ExactRational& delta, int n_min, int n_max) {
  const Shift s = Shift::make(delta);
  VerificationReport rep;
  rep.name = "separation";
  rep.parameters["delta"] = delta.str();
  rep.parameters["levels"] = std::to_string(n_min) + ".." + std::to_string(n_max);
  Check& gap_check = rep.check("min gap >= d(delta) 2^-n", true);
  const bool third = delta == ExactRational(1, 3);
  for (int n = n_min; n <= n_max; ++n) {
    const Domain window = Domain::line(std::max(2, 3 - n), std::max(n, 1));
    auto [a, b] = endpoint_sets({GridSpec::standard(window), GridSpec::shifted(delta, window)}, n);
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    ExactRational gap = a[1] - a[0];
    for (std::size_t i = 2; i < a.size(); ++i) gap = min(gap, a[i] - a[i - 1]);
    const ExactRational bound = s.distance * ExactRational::dyadic(1, n);
    const std::string tag = std::to_string(n);
    rep.constants["gap(" + tag + ") 2^n"] = gap.mul_pow2(n).to_double();
    gap_check.record_exact(gap >= bound, gap.to_double(), bound.to_double(), [&] { return "n = " + tag; });
    if (third && n < 0 && n % 2 == 0) {
      rep.check("delta = 1/3, even n < 0: gap = d(delta) 2^-n", true)
          .record_exact(gap == bound, gap.to_double(), bound.to_double(), [&] { return "n = " + tag; });
    }
  }
  return rep;
}

}  // namespace dyadic
