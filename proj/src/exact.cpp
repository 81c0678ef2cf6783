#include "dyadic/exact.hpp"

#include <cmath>
#include <ostream>

namespace dyadic {

ExactRational::ExactRational(long num, long den) {
  if (den == 0) throw DomainError("zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

ExactRational::ExactRational(mpq_class value) : v_(std::move(value)) { v_.canonicalize(); }

ExactRational ExactRational::parse(std::string_view text) {
  std::string s(text);
  const auto slash = s.find('/');
  mpz_class num;
  mpz_class den = 1;
  try {
    if (slash == std::string::npos) {
      if (s.empty() || num.set_str(s, 10) != 0) throw DomainError("bad rational: " + s);
    } else {
      const std::string ns = s.substr(0, slash);
      const std::string ds = s.substr(slash + 1);
      if (ns.empty() || ds.empty() || num.set_str(ns, 10) != 0 || den.set_str(ds, 10) != 0) {
        throw DomainError("bad rational: " + s);
      }
    }
  } catch (const std::invalid_argument&) {
    throw DomainError("bad rational: " + s);
  }
  if (den == 0) throw DomainError("zero denominator: " + s);
  mpq_class q(num, den);
  q.canonicalize();
  return ExactRational(q);
}

ExactRational ExactRational::dyadic(const mpz_class& k, int n) {
  mpq_class q(k);
  if (n >= 0) {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(n));
  } else {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-n));
  }
  return ExactRational(q);
}

ExactRational ExactRational::from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("non-finite value");
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), x);
  return ExactRational(q);
}

mpz_class ExactRational::floor() const {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
  return r;
}

mpz_class ExactRational::ceil() const {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
  return r;
}

ExactRational ExactRational::frac() const {
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
  return ExactRational(mpq_class(r, v_.get_den()));
}

ExactRational ExactRational::mul_pow2(long n) const {
  ExactRational out;
  if (n >= 0) {
    mpq_mul_2exp(out.v_.get_mpq_t(), v_.get_mpq_t(), static_cast<mp_bitcnt_t>(n));
  } else {
    mpq_div_2exp(out.v_.get_mpq_t(), v_.get_mpq_t(), static_cast<mp_bitcnt_t>(-n));
  }
  return out;
}

long ExactRational::floor_log2() const {
  if (sign() <= 0) throw DomainError("floor_log2 of non-positive value");
  const long nb = static_cast<long>(mpz_sizeinbase(v_.get_num_mpz_t(), 2));
  const long db = static_cast<long>(mpz_sizeinbase(v_.get_den_mpz_t(), 2));
  // 2^(nb-1) <= num < 2^nb, 2^(db-1) <= den < 2^db, so log2(x) lies in (nb-db-1, nb-db+1).
  long k = nb - db;
  if (*this < ExactRational::dyadic(1, static_cast<int>(-k))) --k;
  return k;
}

ExactRational ExactRational::abs() const { return sign() < 0 ? -*this : *this; }

ExactRational& ExactRational::operator/=(const ExactRational& o) {
  if (o.is_zero()) throw DomainError("division by zero");
  v_ /= o.v_;
  return *this;
}

std::string ExactRational::str() const {
  if (is_integer()) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const ExactRational& r) { return os << r.str(); }

ExactRational min(const ExactRational& a, const ExactRational& b) { return b < a ? b : a; }
ExactRational max(const ExactRational& a, const ExactRational& b) { return a < b ? b : a; }

DyadicValue::DyadicValue(mpz_class mantissa, long scale)
    : mantissa_(std::move(mantissa)), scale_(scale) {
  if (mantissa_ == 0) {
    scale_ = 0;
    return;
  }
  const auto tz = mpz_scan1(mantissa_.get_mpz_t(), 0);
  if (tz > 0) {
    mpz_fdiv_q_2exp(mantissa_.get_mpz_t(), mantissa_.get_mpz_t(), tz);
    scale_ -= static_cast<long>(tz);
  }
}

DyadicValue DyadicValue::from_rational(const ExactRational& r) {
  const mpz_class& den = r.denominator();
  const auto bits = mpz_scan1(den.get_mpz_t(), 0);
  mpz_class rest;
  mpz_fdiv_q_2exp(rest.get_mpz_t(), den.get_mpz_t(), bits);
  if (rest != 1) throw DomainError("not a dyadic rational: " + r.str());
  return DyadicValue(r.numerator(), static_cast<long>(bits));
}

ExactRational relative_distance(const ExactRational& delta) {
  if (delta.sign() <= 0 || delta >= ExactRational(1)) {
    throw DomainError("relative_distance requires 0 < delta < 1, got " + delta.str());
  }
  const mpz_class& q = delta.denominator();
  const auto twos = mpz_scan1(q.get_mpz_t(), 0);

  // Orbit of the numerator under r -> 2r mod q; the fractional part of
  // 2^n * delta is r_n / q. Purely periodic once the power of two in q is used up.
  mpz_class r = delta.numerator();
  mpz_class best = q;
  auto visit = [&](const mpz_class& x) {
    mpz_class other = q - x;
    const mpz_class& near = (other < x) ? other : x;
    if (near < best) best = near;
  };
  for (unsigned long n = 0; n < twos; ++n) {
    visit(r);
    r = (2 * r) % q;
  }
  const mpz_class start = r;
  do {
    visit(r);
    if (best == 0) break;
    r = (2 * r) % q;
  } while (r != start);
  return ExactRational(mpq_class(best, q));
}

ExactRational covering_constant(const ExactRational& delta) {
  const ExactRational d = relative_distance(delta);
  if (d.is_zero()) throw DomainError("delta " + delta.str() + " is a dyadic rational; d(delta) = 0");
  return ExactRational(2) / d;
}

Shift Shift::make(const ExactRational& delta) {
  Shift s;
  s.delta = delta;
  s.distance = relative_distance(delta);
  if (s.distance.is_zero()) {
    throw DomainError("delta " + delta.str() + " is a dyadic rational; d(delta) = 0");
  }
  s.covering = ExactRational(2) / s.distance;
  return s;
}

}  // namespace dyadic
