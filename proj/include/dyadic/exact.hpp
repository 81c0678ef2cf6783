#pragma once

// Exact rational arithmetic and the shift diagnostics built on it.
//
// All interval geometry in this library is carried out on ExactRational so
// containment and separation checks never depend on rounding.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dyadic {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ExactRational {
 public:
  ExactRational() = default;
  ExactRational(long value) : v_(value) {}  // NOLINT(google-explicit-constructor)
  ExactRational(long num, long den);
  explicit ExactRational(const mpz_class& integer) : v_(integer) {}
  explicit ExactRational(mpq_class value);

  /// Parses "p/q", "-p/q" or an integer "p". Throws DomainError on malformed input.
  static ExactRational parse(std::string_view text);
  /// k * 2^-n for any sign of n.
  static ExactRational dyadic(const mpz_class& k, int n);
  /// The exact value of a finite binary64.
  static ExactRational from_double(double x);

  const mpz_class& numerator() const { return v_.get_num(); }
  const mpz_class& denominator() const { return v_.get_den(); }
  const mpq_class& raw() const { return v_; }

  int sign() const { return sgn(v_); }
  bool is_zero() const { return sign() == 0; }
  bool is_integer() const { return v_.get_den() == 1; }

  mpz_class floor() const;
  mpz_class ceil() const;
  /// x - floor(x), in [0, 1).
  ExactRational frac() const;
  /// x * 2^n (n may be negative).
  ExactRational mul_pow2(long n) const;
  /// Largest n with 2^n <= x. Requires x > 0.
  long floor_log2() const;
  ExactRational abs() const;

  double to_double() const { return v_.get_d(); }
  std::string str() const;

  ExactRational& operator+=(const ExactRational& o) { v_ += o.v_; return *this; }
  ExactRational& operator-=(const ExactRational& o) { v_ -= o.v_; return *this; }
  ExactRational& operator*=(const ExactRational& o) { v_ *= o.v_; return *this; }
  ExactRational& operator/=(const ExactRational& o);

  friend ExactRational operator+(ExactRational a, const ExactRational& b) { return a += b; }
  friend ExactRational operator-(ExactRational a, const ExactRational& b) { return a -= b; }
  friend ExactRational operator*(ExactRational a, const ExactRational& b) { return a *= b; }
  friend ExactRational operator/(ExactRational a, const ExactRational& b) { return a /= b; }
  ExactRational operator-() const { return ExactRational(mpq_class(-v_)); }

  friend bool operator==(const ExactRational& a, const ExactRational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const ExactRational& a, const ExactRational& b) {
    const int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const ExactRational& r);

ExactRational min(const ExactRational& a, const ExactRational& b);
ExactRational max(const ExactRational& a, const ExactRational& b);

/// Dyadic rational mantissa * 2^-scale, kept canonical (mantissa odd or zero).
class DyadicValue {
 public:
  DyadicValue() = default;
  DyadicValue(mpz_class mantissa, long scale);

  /// 2^-n.
  static DyadicValue pow2(long minus_n) { return DyadicValue(1, minus_n); }
  static DyadicValue from_rational(const ExactRational& r);  // throws if r not dyadic

  const mpz_class& mantissa() const { return mantissa_; }
  long scale() const { return scale_; }
  ExactRational to_rational() const { return ExactRational::dyadic(mantissa_, scale_); }
  double to_double() const { return to_rational().to_double(); }

  friend bool operator==(const DyadicValue& a, const DyadicValue& b) {
    return a.mantissa_ == b.mantissa_ && a.scale_ == b.scale_;
  }

 private:
  mpz_class mantissa_ = 0;
  long scale_ = 0;
};

/// inf over n >= 0 of dist(2^n * delta, Z), computed exactly from the
/// eventually periodic binary orbit of delta. Zero iff delta is dyadic.
ExactRational relative_distance(const ExactRational& delta);

/// 2 / d(delta); throws DomainError when delta is a dyadic rational.
ExactRational covering_constant(const ExactRational& delta);

/// A validated translation parameter with its diagnostics precomputed.
struct Shift {
  ExactRational delta;
  ExactRational distance;  // d(delta)
  ExactRational covering;  // C(delta) = 2 / d(delta)

  static Shift make(const ExactRational& delta);
  double covering_value() const { return covering.to_double(); }
};

}  // namespace dyadic
