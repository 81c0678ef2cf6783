#pragma once

// Standard, shifted and naively shifted dyadic grids on the circle and on a
// finite window of the line.
//
// Level n intervals have length 2^-n. On the line the shifted grid carries an
// extra translation s_n at negative levels so that large intervals around the
// origin are still covered.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dyadic/exact.hpp"

namespace dyadic {

struct Domain {
  enum class Kind { Torus, Line };

  Kind kind = Kind::Torus;
  int finest = 1;   // L: mesh cells have length 2^-L
  int coarsest = 0; // M: line window is [-2^M, 2^M); unused on the torus

  static Domain torus(int finest_level);
  static Domain line(int coarsest_level, int finest_level);

  bool is_torus() const { return kind == Kind::Torus; }
  int min_level() const { return is_torus() ? 0 : -coarsest; }
  int max_level() const { return finest; }
  ExactRational left() const;
  ExactRational right() const;
  ExactRational length() const { return right() - left(); }
  ExactRational cell_length() const { return ExactRational::dyadic(1, finest); }
  std::size_t cells() const;

  /// Reduces x into [0, 1) on the torus; identity on the line.
  ExactRational reduce(const ExactRational& x) const;
  bool contains_point(const ExactRational& x) const;

  friend bool operator==(const Domain&, const Domain&) = default;
};

enum class Family { Standard, Shifted, NaiveShifted };

struct GridSpec {
  Family family = Family::Standard;
  std::optional<ExactRational> delta;
  Domain domain;

  static GridSpec standard(const Domain& domain);
  /// Validates 0 < delta < 1 with d(delta) > 0.
  static GridSpec shifted(const ExactRational& delta, const Domain& domain);
  static GridSpec naive(const ExactRational& delta, const Domain& domain);

  /// Left endpoint of the k = 0 interval at level n.
  ExactRational offset(int level) const;
  std::string tag() const;  // "std" | "delta" | "naive"

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct IntervalId {
  GridSpec grid;
  int level = 0;
  mpz_class index = 0;

  friend bool operator==(const IntervalId& a, const IntervalId& b) {
    return a.grid == b.grid && a.level == b.level && a.index == b.index;
  }
};

/// A half-open interval [left, left + length). On the torus left is in [0, 1)
/// and the arc may wrap past 1.
struct Interval {
  ExactRational left;
  DyadicValue length;

  ExactRational right() const { return left + length.to_rational(); }
};

/// s_n: 0 for n >= 0, otherwise (4^c - 1) / 3 with c = floor((1 - n) / 2), i.e.
/// 1, 1, 5, 5, 21, ... for n = -1, -2, -3, -4, -5, ...
ExactRational level_shift(int level);

Interval interval(const IntervalId& id);
IntervalId locate(const GridSpec& grid, int level, const ExactRational& x);

/// Left endpoints of every level-n interval of the grid that meets the domain.
std::vector<ExactRational> endpoint_set(const GridSpec& grid, int level);
std::pair<std::vector<ExactRational>, std::vector<ExactRational>> endpoint_sets(
    const std::pair<GridSpec, GridSpec>& grids, int level);

/// Level-n intervals lying entirely inside the domain (all of them on the torus).
std::vector<IntervalId> resident_intervals(const GridSpec& grid, int level);

/// Parent at level n-1 of the same grid.
IntervalId parent(const IntervalId& id);

/// True when `inner` = [a, a+la) is contained in `outer` = [b, b+lb); on the
/// torus containment is tested on the circle.
bool contains(const Domain& domain, const ExactRational& outer_left, const ExactRational& outer_length,
              const ExactRational& inner_left, const ExactRational& inner_length);

}  // namespace dyadic
