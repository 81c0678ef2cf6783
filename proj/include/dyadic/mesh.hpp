#pragma once

// Piecewise-constant data on the finest mesh, and the breakpoint partitions
// the interval scans run on.
//
// A Partition refines the mesh. With a shift delta it also cuts every mesh
// cell at the finest shifted-grid point, so both grids' intervals start and
// end on breakpoints. Intervals are addressed by breakpoint indices [a, b);
// on the torus b may run up to 2K (one unrolled turn).

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dyadic/covering.hpp"
#include "dyadic/exact.hpp"
#include "dyadic/grids.hpp"

namespace dyadic {

struct MeshFunction1D {
  Domain domain;
  std::vector<double> values;  // one per mesh cell, left to right

  /// Validates length and finiteness.
  static MeshFunction1D make(const Domain& domain, std::vector<double> values);
  std::size_t size() const { return values.size(); }
};

struct MeshWeight1D {
  Domain domain;
  std::vector<double> values;

  /// Validates length and strict positivity.
  static MeshWeight1D make(const Domain& domain, std::vector<double> values);
  std::size_t size() const { return values.size(); }
  MeshFunction1D function() const { return MeshFunction1D{domain, values}; }
};

/// Row-major: values[i * n2 + j] is the cell (i, j), i along the first axis.
struct MeshFunction2D {
  Domain first;
  Domain second;
  std::vector<double> values;

  static MeshFunction2D make(const Domain& first, const Domain& second, std::vector<double> values);
  std::size_t n1() const { return first.cells(); }
  std::size_t n2() const { return second.cells(); }
  double at(std::size_t i, std::size_t j) const { return values[i * n2() + j]; }
};

struct MeshWeight2D {
  Domain first;
  Domain second;
  std::vector<double> values;

  static MeshWeight2D make(const Domain& first, const Domain& second, std::vector<double> values);
  std::size_t n1() const { return first.cells(); }
  std::size_t n2() const { return second.cells(); }
  double at(std::size_t i, std::size_t j) const { return values[i * n2() + j]; }
  MeshFunction2D function() const { return MeshFunction2D{first, second, values}; }
};

/// A breakpoint-aligned interval [start, start + span) in partition indices.
struct Span {
  std::size_t start = 0;
  std::size_t span = 0;
  std::size_t end() const { return start + span; }
  friend bool operator==(const Span&, const Span&) = default;
};

class Partition {
 public:
  /// Breakpoints at the mesh points only.
  static Partition mesh(const Domain& domain);
  /// Mesh points plus the finest shifted-grid points delta + k 2^-L.
  static Partition refined(const Domain& domain, const ExactRational& delta);

  const Domain& domain() const { return domain_; }
  bool periodic() const { return domain_.is_torus(); }
  const std::optional<ExactRational>& delta() const { return delta_; }
  std::size_t size() const { return k_; }
  std::size_t stride() const { return stride_; }
  /// Longest admissible span: K on both domains.
  std::size_t max_span() const { return k_; }
  /// Largest admissible end index: 2K on the torus, K on the line.
  std::size_t limit() const { return periodic() ? 2 * k_ : k_; }

  /// Mesh cell holding sub-cell j (j may be unrolled).
  std::size_t cell(std::size_t j) const { return (j % k_) / stride_; }
  /// Sub-cell lengths, unrolled to 2K on the torus.
  const std::vector<double>& lengths() const { return len_; }
  /// Breakpoint coordinates measured from the domain's left end, size limit() + 1.
  const std::vector<double>& coords() const { return x_; }
  double length(const Span& s) const { return x_[s.end()] - x_[s.start]; }

  ExactRational point(std::size_t j) const;
  /// Breakpoint index in [0, K) of x (reduced mod 1 on the torus), if x is one.
  std::optional<std::size_t> index_of(const ExactRational& x) const;
  /// Throws DomainError unless both ends of q are breakpoints and q fits the domain.
  Span locate(const ArbitraryInterval& q) const;
  ArbitraryInterval interval(const Span& s) const;

  /// Spans of the resident level-n intervals of the grid (all of them on the torus).
  /// Throws DomainError when the grid's endpoints are not breakpoints.
  std::vector<Span> grid_spans(const GridSpec& grid, int level) const;
  Span span_of(const IntervalId& id) const;

  /// Per-sub-cell copy of per-cell data, unrolled to 2K on the torus.
  std::vector<double> expand(const std::vector<double>& cell_values) const;

 private:
  Domain domain_;
  std::optional<ExactRational> delta_;
  ExactRational theta_;  // cut position inside each cell, in cell units
  std::size_t k_ = 0;
  std::size_t stride_ = 1;
  std::vector<double> len_;
  std::vector<double> x_;
};

/// Spans of every resident interval of the grid at levels min..max.
std::vector<Span> grid_family(const Partition& part, const GridSpec& grid, int min_level, int max_level);

/// Compensated running integrals of a piecewise-constant density over a partition.
class PrefixTable {
 public:
  PrefixTable() = default;
  PrefixTable(const Partition& part, const std::vector<double>& cell_values);

  double integral(std::size_t a, std::size_t b) const { return p_[b] - p_[a]; }
  double integral(const Span& s) const { return integral(s.start, s.end()); }
  const std::vector<double>& data() const { return p_; }

 private:
  std::vector<double> p_;
};

/// Mean of f over a mesh-aligned interval (torus arcs may wrap).
double average(const MeshFunction1D& f, const ArbitraryInterval& q);
/// Integral of w over a mesh-aligned interval.
double weight_measure(const MeshWeight1D& w, const ArbitraryInterval& q);
/// Integral of w over any interval with rational endpoints (partial cells included).
double weight_integral(const MeshWeight1D& w, const ArbitraryInterval& q);

/// Every mesh-aligned interval of length >= min_len, ordered by left endpoint
/// then length. On the torus the whole circle appears once.
void for_each_interval(const Domain& domain, const DyadicValue& min_len,
                       const std::function<void(const ArbitraryInterval&)>& visit);
std::vector<ArbitraryInterval> enumerate_intervals(const Domain& domain, const DyadicValue& min_len);

struct ComparableAveragesReport {
  IntervalId cover;
  double avg_q = 0.0;
  double avg_i = 0.0;
  double lower_factor = 0.0;  // C_dy^-log2(4 C(delta))
  double upper_factor = 0.0;  // C(delta)
  double slack = 0.0;         // smallest of the two relative margins
  bool pass = false;
};

/// Checks C_dy^-log2(4C) avg_I w <= avg_Q w <= C avg_I w for I = cover(q, delta),
/// with C_dy the dyadic doubling constant measured beforehand (both grids,
/// deep enough to reach the descendants the argument uses).
ComparableAveragesReport comparable_averages_check(const MeshWeight1D& w, const Shift& shift,
                                                   const ArbitraryInterval& q, double doubling_constant);

// Serialization. Values round-trip bit-exactly.
std::string to_json(const MeshFunction1D& f);
std::string to_json(const MeshFunction2D& f);
MeshFunction1D function_from_json(const std::string& text);
MeshFunction2D function2d_from_json(const std::string& text);
std::string to_csv(const MeshFunction1D& f);
MeshFunction1D function_from_csv(const std::string& text);

}  // namespace dyadic
