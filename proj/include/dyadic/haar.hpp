#pragma once

// Haar analysis on one grid, dyadic and continuous BMO, projections and
// finite-Haar truncations.
//
// h_I = |I|^-1/2 (1 on the left half, -1 on the right half). Coefficients
// are produced for levels min..L-1, where both halves are partition spans.
// On a shifted grid the finest cells straddle a mesh point, so f is not
// constant on them; the energy of f inside those cells (which the Haar
// terms below the mesh would carry) is kept per cell as the tail.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyadic/mesh.hpp"
#include "dyadic/report.hpp"

namespace dyadic {

struct HaarTerm {
  IntervalId id;
  Span span;
  double coeff = 0.0;
};

struct HaarCoefficients {
  GridSpec grid;
  Partition partition;
  int min_level = 0;
  int max_level = 0;             // finest level with a coefficient, L - 1
  std::vector<HaarTerm> terms;   // level by level, each level in resident order
  std::vector<std::size_t> level_offset;  // terms of level n start at level_offset[n - min_level]
  std::optional<double> mean;    // torus: the integral of f over the circle
  std::vector<Span> cells;       // level-L intervals of the grid
  std::vector<double> cell_tail; // energy of f - (its mean) inside each level-L interval
  double tail = 0.0;

  const HaarTerm* find(const IntervalId& id) const;
  /// Sum of squared coefficients.
  double energy() const;
  nlohmann::ordered_json to_json() const;
};

/// Transform on the mesh partition (standard grid) or the partition refined by
/// the grid's shift.
HaarCoefficients haar_transform(const MeshFunction1D& f, const GridSpec& grid);
/// Transform with spans on a given partition (both grids can share one).
HaarCoefficients haar_transform(const MeshFunction1D& f, const GridSpec& grid, const Partition& part);

/// Integral of f^2 over the domain.
double l2_norm_squared(const MeshFunction1D& f);

enum class BMOMode { Avg, AvgP, Carleson };

struct BMOReport {
  std::string family;  // "continuous", "std", "delta", ...
  BMOMode mode = BMOMode::Avg;
  double p = 2.0;
  double value = 0.0;  // the norm asked for
  double norm_avg = 0.0;
  double norm_p2 = 0.0;
  std::optional<double> norm_carleson;  // grids only
  Span argmax;
  std::optional<ArbitraryInterval> argmax_interval;
};

/// Means, oscillations and Carleson sums of one function over partition spans.
class OscillationTable {
 public:
  OscillationTable(const MeshFunction1D& f, const Partition& part);

  const Partition& partition() const { return *part_; }
  double mean(const Span& s) const;
  /// (1/|I|) integral over I of |f - f_I|.
  double oscillation(const Span& s) const;
  /// ((1/|I|) integral over I of |f - f_I|^p)^(1/p).
  double p_oscillation(const Span& s, double p) const;
  /// Largest oscillation over every span of at least `stride` sub-cells.
  BMOReport continuous() const;

 private:
  const Partition* part_;
  std::vector<double> v_;    // sub-cell values, unrolled
  PrefixTable prefix_;
};

/// Dyadic BMO of one grid in the requested mode; the report carries all three
/// norms (AvgP uses p, norm_p2 always p = 2).
BMOReport bmo_dyadic(const MeshFunction1D& f, const GridSpec& grid, BMOMode mode = BMOMode::Avg, double p = 2.0);
BMOReport bmo_dyadic(const MeshFunction1D& f, const GridSpec& grid, const Partition& part, BMOMode mode,
                     double p = 2.0);

/// Sup of the mean oscillation over every mesh-aligned interval.
BMOReport bmo_continuous(const MeshFunction1D& f);
/// Same over every breakpoint span of the partition.
BMOReport bmo_continuous(const MeshFunction1D& f, const Partition& part);

/// Per-interval Carleson/oscillation chains on one grid:
/// (1/|J|) sum_{I in J} (f,h_I)^2 <= (2-oscillation over J)^2 and
/// oscillation over J <= sqrt(Carleson constant).
VerificationReport bmo_chain_check(const MeshFunction1D& f, const GridSpec& grid, const Partition& part);

/// |sum coeff^2 + mean^2 + tail - ||f||^2| <= kIdentityTol ||f||^2 (torus).
VerificationReport parseval_check(const MeshFunction1D& f, const GridSpec& grid);

/// max(|f|_d, |f|_delta) <= |f|_* exactly (both grids are members of the
/// continuous family on the refined partition), the chains on both grids, and
/// the reverse ratio |f|_* / max against the monitored cap.
VerificationReport verify_bmo_intersection(const MeshFunction1D& f, const ExactRational& delta,
                                           double k_cap = 64.0);

/// P_J f = sum_{I in J} (f,h_I) h_I on the mesh. J must be a standard interval
/// at a level <= L.
MeshFunction1D project(const MeshFunction1D& f, const IntervalId& j);

/// Keeps the standard Haar terms with I inside [-2^n, 2^n) and 2^-n <= |I| <= 2^n
/// (plus the mean on the torus, and the means of the two coarsest intervals
/// on the line).
MeshFunction1D vmo_truncation(const MeshFunction1D& f, int n);

/// The standard Carleson norm of f - f_n is nonincreasing for n = 0..N and
/// vanishes at N = max(M, L), where the window holds every term.
VerificationReport verify_truncation(const MeshFunction1D& f);

/// Sum of `terms` standard Haar functions at random resident intervals with
/// coefficients uniform in [-1, 1], plus a random constant on the torus.
MeshFunction1D generate_finite_haar(std::uint64_t seed, const Domain& domain, int terms);

/// Mesh values of h_I for a standard interval at level <= L - 1.
MeshFunction1D haar_function(const IntervalId& id);

}  // namespace dyadic
