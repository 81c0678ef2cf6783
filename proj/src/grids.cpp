#include "dyadic/grids.hpp"

#include <algorithm>

namespace dyadic {

Domain Domain::torus(int finest_level) {
  if (finest_level < 1) throw DomainError("torus finest level must be >= 1");
  return Domain{Kind::Torus, finest_level, 0};
}

Domain Domain::line(int coarsest_level, int finest_level) {
  if (finest_level < 1) throw DomainError("line finest level must be >= 1");
  if (coarsest_level < 0) throw DomainError("line window exponent M must be >= 0");
  return Domain{Kind::Line, finest_level, coarsest_level};
}

ExactRational Domain::left() const {
  return is_torus() ? ExactRational(0) : -ExactRational::dyadic(1, -coarsest);
}

ExactRational Domain::right() const {
  return is_torus() ? ExactRational(1) : ExactRational::dyadic(1, -coarsest);
}

std::size_t Domain::cells() const {
  return is_torus() ? (std::size_t{1} << finest) : (std::size_t{1} << (coarsest + finest + 1));
}

ExactRational Domain::reduce(const ExactRational& x) const { return is_torus() ? x.frac() : x; }

bool Domain::contains_point(const ExactRational& x) const {
  if (is_torus()) return true;
  return left() <= x && x < right();
}

GridSpec GridSpec::standard(const Domain& domain) { return GridSpec{Family::Standard, std::nullopt, domain}; }

GridSpec GridSpec::shifted(const ExactRational& delta, const Domain& domain) {
  Shift::make(delta);  // validates 0 < delta < 1 and d(delta) > 0
  return GridSpec{Family::Shifted, delta, domain};
}

GridSpec GridSpec::naive(const ExactRational& delta, const Domain& domain) {
  if (delta.sign() <= 0 || delta >= ExactRational(1)) {
    throw DomainError("naive shift requires 0 < delta < 1");
  }
  return GridSpec{Family::NaiveShifted, delta, domain};
}

ExactRational GridSpec::offset(int level) const {
  switch (family) {
    case Family::Standard:
      return 0;
    case Family::NaiveShifted:
      return *delta;
    case Family::Shifted:
      return *delta + level_shift(level);
  }
  return 0;
}

std::string GridSpec::tag() const {
  switch (family) {
    case Family::Standard:
      return "std";
    case Family::Shifted:
      return "delta";
    case Family::NaiveShifted:
      return "naive";
  }
  return "std";
}

ExactRational level_shift(int level) {
  if (level >= 0) return 0;
  const long terms = (1L - level) / 2;
  mpz_class four_pow;
  mpz_ui_pow_ui(four_pow.get_mpz_t(), 4, static_cast<unsigned long>(terms));
  return ExactRational(mpz_class((four_pow - 1) / 3));
}

namespace {

void check_level(const Domain& domain, int level) {
  if (domain.is_torus() && level < 0) {
    throw DomainError("torus grids have no levels below 0 (got " + std::to_string(level) + ")");
  }
}

mpz_class pow2(int n) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(n));
  return r;
}

}  // namespace

Interval interval(const IntervalId& id) {
  check_level(id.grid.domain, id.level);
  ExactRational left = id.grid.offset(id.level) + ExactRational::dyadic(id.index, id.level);
  return Interval{id.grid.domain.reduce(left), DyadicValue::pow2(id.level)};
}

IntervalId locate(const GridSpec& grid, int level, const ExactRational& x) {
  check_level(grid.domain, level);
  if (!grid.domain.contains_point(x)) throw DomainError("point " + x.str() + " outside the line window");
  const ExactRational xr = grid.domain.reduce(x);
  mpz_class k = (xr - grid.offset(level)).mul_pow2(level).floor();
  if (grid.domain.is_torus()) {
    const mpz_class count = pow2(level);
    mpz_fdiv_r(k.get_mpz_t(), k.get_mpz_t(), count.get_mpz_t());
  }
  return IntervalId{grid, level, k};
}

std::vector<ExactRational> endpoint_set(const GridSpec& grid, int level) {
  check_level(grid.domain, level);
  std::vector<ExactRational> out;
  const Domain& dom = grid.domain;
  const ExactRational off = grid.offset(level);
  if (dom.is_torus()) {
    const long count = 1L << level;
    out.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k) out.push_back((off + ExactRational::dyadic(k, level)).frac());
  } else {
    mpz_class k = (dom.left() - off).mul_pow2(level).ceil();
    for (;; ++k) {
      ExactRational e = off + ExactRational::dyadic(k, level);
      if (e >= dom.right()) break;
      out.push_back(std::move(e));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<std::vector<ExactRational>, std::vector<ExactRational>> endpoint_sets(
    const std::pair<GridSpec, GridSpec>& grids, int level) {
  if (!(grids.first.domain == grids.second.domain)) throw DomainError("grids must share a domain");
  return {endpoint_set(grids.first, level), endpoint_set(grids.second, level)};
}

std::vector<IntervalId> resident_intervals(const GridSpec& grid, int level) {
  check_level(grid.domain, level);
  std::vector<IntervalId> out;
  const Domain& dom = grid.domain;
  if (dom.is_torus()) {
    const long count = 1L << level;
    out.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k) out.push_back(IntervalId{grid, level, k});
    return out;
  }
  const ExactRational off = grid.offset(level);
  const ExactRational len = ExactRational::dyadic(1, level);
  mpz_class k = (dom.left() - off).mul_pow2(level).ceil();
  for (;; ++k) {
    const ExactRational l = off + ExactRational::dyadic(k, level);
    if (l + len > dom.right()) break;
    out.push_back(IntervalId{grid, level, k});
  }
  return out;
}

IntervalId parent(const IntervalId& id) {
  check_level(id.grid.domain, id.level - 1);
  const ExactRational left = id.grid.offset(id.level) + ExactRational::dyadic(id.index, id.level);
  mpz_class k = (left - id.grid.offset(id.level - 1)).mul_pow2(id.level - 1).floor();
  if (id.grid.domain.is_torus()) {
    const mpz_class count = pow2(id.level - 1);
    mpz_fdiv_r(k.get_mpz_t(), k.get_mpz_t(), count.get_mpz_t());
  }
  return IntervalId{id.grid, id.level - 1, k};
}

bool contains(const Domain& domain, const ExactRational& outer_left, const ExactRational& outer_length,
              const ExactRational& inner_left, const ExactRational& inner_length) {
  if (domain.is_torus()) {
    if (outer_length >= ExactRational(1)) return true;
    if (inner_length > outer_length) return false;
    const ExactRational gap = (inner_left - outer_left).frac();
    return gap + inner_length <= outer_length;
  }
  return outer_left <= inner_left && inner_left + inner_length <= outer_left + outer_length;
}

}  // namespace dyadic
