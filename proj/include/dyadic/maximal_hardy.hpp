#pragma once

// Uncentered Hardy-Littlewood maximal functions (plain and weighted) over the
// continuous family and over single grids, and weighted H^1 atoms.
//
// Maximal functions are evaluated on partition sub-cells: the value at x is
// the sup over family members containing the sub-cell that holds x. Grid
// families stop at the mesh level.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dyadic/mesh.hpp"
#include "dyadic/report.hpp"

namespace dyadic {

struct MaximalFamily {
  std::optional<GridSpec> grid;  // empty: every interval

  static MaximalFamily continuous() { return MaximalFamily{}; }
  static MaximalFamily of(const GridSpec& g) { return MaximalFamily{g}; }
};

/// Values on every sub-cell of the partition (size K). The weight, if given,
/// turns averages into (1 / w(Q)) integral over Q of |f| w.
std::vector<double> maximal_on(const MeshFunction1D& f, const Partition& part, const MaximalFamily& family,
                               const MeshWeight1D* w = nullptr);

/// Maximal function sampled at the mesh points (the sub-cell starting at each
/// one), on the mesh partition or the one refined by the grid's shift.
MeshFunction1D hl_maximal(const MeshFunction1D& f, const MaximalFamily& family,
                          const std::optional<MeshWeight1D>& w = std::nullopt);

/// At every sub-cell of the partition refined by delta: M_d + M_delta <= 2M
/// exactly, and M <= C(delta) max(M_d, M_delta) unweighted or
/// M_w <= C(delta) C_dy^log2(4C(delta)) (M_d,w + M_delta,w) weighted, with
/// C_dy measured on both grids (torus only when weighted).
VerificationReport verify_maximal_comparability(const MeshFunction1D& f, const ExactRational& delta,
                                                const std::optional<MeshWeight1D>& w = std::nullopt);

/// An H^1(w) atom: values / divisor on the mesh, vanishing off the support.
struct Atom {
  ArbitraryInterval support;
  std::vector<double> values;
  double divisor = 1.0;

  MeshFunction1D function() const;
};

struct AtomValidation {
  bool support = false;       // nonzero cells lie inside the support
  bool size = false;          // ||a||_L2(w) <= w(Q)^-1/2
  bool cancellation = false;  // |integral a w| <= 1e-12 ||a||_L2(w) w(Q)^1/2
  double l2 = 0.0;
  double l2_bound = 0.0;
  double moment = 0.0;
  double moment_bound = 0.0;
  std::string reason;  // first failed condition

  bool pass() const { return support && size && cancellation; }
};

AtomValidation validate_atom(const Atom& a, const MeshWeight1D& w);

struct RescaledAtom {
  IntervalId cover;
  double c0 = 0.0;
  double doubling_constant = 0.0;
  Atom atom;                  // support is the cover, divisor multiplied by c0
  AtomValidation validation;  // of `atom` against the weight
};

/// Reinterprets C0^-1 a as an atom on I = cover(Q, delta) with
/// C0 = C(delta)^1/2 C_dy^(log2(4C(delta)) / 2). Throws DomainError for an
/// invalid input atom.
RescaledAtom atom_rescale(const Atom& a, const MeshWeight1D& w, const ExactRational& delta);
RescaledAtom atom_rescale(const Atom& a, const MeshWeight1D& w, const Shift& shift, double doubling_constant);

/// sum base_i * atom_i; an entry's coefficient is base * atom.divisor, so
/// rescaling an atom moves a factor between the two without touching values.
struct AtomicDecomposition {
  struct Entry {
    double base = 0.0;
    Atom atom;
    double coefficient() const { return base * atom.divisor; }
  };
  std::vector<Entry> entries;

  /// Sum of |coefficient|.
  double norm() const;
  /// sum base_i * values_i on the mesh.
  MeshFunction1D reconstruct(const Domain& domain) const;
};

struct SplitDecomposition {
  AtomicDecomposition standard;
  AtomicDecomposition shifted;
  double c0 = 0.0;
  std::vector<AtomValidation> validations;  // one per input entry, in order
  std::vector<bool> to_standard;            // where each input entry went
};

SplitDecomposition decompose_h1(const AtomicDecomposition& d, const MeshWeight1D& w, const ExactRational& delta);

/// Validity of every rescaled atom, bit-identical reconstruction and
/// norm(standard) + norm(shifted) <= C0 norm(d).
VerificationReport verify_decomposition(const AtomicDecomposition& d, const MeshWeight1D& w,
                                        const ExactRational& delta);

/// Random mesh-aligned atom for the weight: random support of at least two
/// cells, weighted mean removed, L2(w) norm a random fraction in [1/2, 1] of
/// the bound.
Atom generate_atom(std::uint64_t seed, const MeshWeight1D& w);

/// Atom with the given support built from `raw` values on the cells inside it.
Atom make_atom(const ArbitraryInterval& support, const MeshWeight1D& w, const std::vector<double>& raw,
               double size_fraction);

}  // namespace dyadic
