#pragma once

// Two-parameter analysis on the torus squared: tensor Haar coefficients over
// the four grid pairs, dyadic product BMO over staircase open sets, strong
// maximal functions, product weights and the dyadic product H^1 norm.
//
// Every factor works on a breakpoint partition (the mesh, or the mesh refined
// by delta), so a rectangle is a pair of spans and grid-pair rectangles are
// members of the continuous rectangle family. Only two factors are
// implemented; per-factor data is kept in arrays indexed by factor.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyadic/mesh.hpp"
#include "dyadic/report.hpp"

namespace dyadic {

struct GridPair {
  GridSpec first;
  GridSpec second;

  /// "dd", "d,delta", "delta,d" or "delta,delta".
  std::string tag() const;
  std::array<GridSpec, 2> factors() const { return {first, second}; }

  /// The four pairs of standard and shifted grids, in the order dd, d delta, delta d, delta delta.
  static std::array<GridPair, 4> all(const Domain& first, const Domain& second, const ExactRational& delta);
  static GridPair standard(const Domain& first, const Domain& second);
};

/// Breakpoint partitions of both factors.
struct Plane {
  Partition first;
  Partition second;

  /// Mesh partitions, or both refined by delta.
  static Plane mesh(const Domain& first, const Domain& second);
  static Plane refined(const Domain& first, const Domain& second, const ExactRational& delta);
  /// The coarsest plane on which every rectangle of the pair is a pair of spans.
  static Plane for_pair(const GridPair& pair);

  std::size_t k1() const { return first.size(); }
  std::size_t k2() const { return second.size(); }
};

struct MeshRectangle {
  ArbitraryInterval q1;
  ArbitraryInterval q2;

  ExactRational area() const { return q1.length * q2.length; }
};

/// A finite union of rectangles standing in for an open set.
struct OpenSetApprox {
  std::vector<MeshRectangle> rectangles;

  /// Sub-cell membership on the plane, row-major K1 x K2. Throws DomainError
  /// when a rectangle end is not a breakpoint.
  std::vector<char> rasterize(const Plane& plane) const;
  /// Exact measure of the union.
  ExactRational measure(const Plane& plane) const;
};

struct Haar2Term {
  std::optional<IntervalId> first;   // empty: the constant function in that factor
  std::optional<IntervalId> second;
  Span span1;
  Span span2;
  double coeff = 0.0;

  bool tensor() const { return first && second; }
};

struct Haar2Coefficients {
  GridPair pair;
  Plane plane;
  std::vector<Haar2Term> terms;  // tensor terms first, then I x 1, 1 x J and the mean
  std::size_t tensor_count = 0;
  double tail = 0.0;             // energy of f minus its means on the level-L rectangles

  /// Sum of squared coefficients.
  double energy() const;
  nlohmann::ordered_json to_json() const;
};

/// Coefficients against h_I x h_J, h_I x 1, 1 x h_J and 1 for I, J at levels
/// 0..L-1 of the pair's grids (torus squared only).
Haar2Coefficients haar2_transform(const MeshFunction2D& f, const GridPair& pair);
Haar2Coefficients haar2_transform(const MeshFunction2D& f, const GridPair& pair, const Plane& plane);

double l2_norm_squared(const MeshFunction2D& f);

/// |sum coeff^2 + tail - ||f||^2| <= kIdentityTol ||f||^2 for every pair.
VerificationReport parseval2_check(const MeshFunction2D& f, const ExactRational& delta);

struct ProductBMOReport {
  std::string pair;
  /// max over the family of (1/|Omega|) sum_{R in Omega} (f,h_R)^2, a lower
  /// bound for the sup over all open sets.
  double value = 0.0;
  std::size_t argmax = 0;             // index into supplied sets, then single rectangles
  std::vector<double> supplied;       // value for each supplied set
  double singles = 0.0;               // best single rectangle
  std::vector<double> carleson_sums;  // sum_{R in Omega} (f,h_R)^2 for each supplied set
  std::vector<double> measures;       // |Omega| for each supplied set
};

/// Supplied sets plus every single tensor rectangle of the pair. Throws
/// DomainError on an empty list.
ProductBMOReport product_bmo_dyadic(const MeshFunction2D& f, const GridPair& pair,
                                    const std::vector<OpenSetApprox>& omegas);
ProductBMOReport product_bmo_dyadic(const Haar2Coefficients& c, const std::vector<OpenSetApprox>& omegas);

/// For every pair and set: sum_{R in Omega} (f,h_R)^2 <= ||f 1_Omega||^2 <=
/// ||f||_inf^2 |Omega|, the subset sum against the total tensor energy, and
/// the reported max nondecreasing along growing prefixes of the family.
VerificationReport verify_product_bmo(const MeshFunction2D& f, const ExactRational& delta,
                                      const std::vector<OpenSetApprox>& omegas);

struct StrongFamily {
  std::optional<GridPair> pair;  // empty: every rectangle

  static StrongFamily continuous() { return StrongFamily{}; }
  static StrongFamily of(const GridPair& p) { return StrongFamily{p}; }
};

/// Values on every sub-cell of the plane, row-major K1 x K2. Grid rectangles
/// use levels 0..L in both factors.
std::vector<double> strong_maximal_on(const MeshFunction2D& f, const Plane& plane, const StrongFamily& family,
                                      const MeshWeight2D* w = nullptr);

/// Sampled at the mesh points.
MeshFunction2D strong_maximal(const MeshFunction2D& f, const StrongFamily& family,
                              const std::optional<MeshWeight2D>& w = std::nullopt);

/// Largest one-parameter grid doubling constant over all row and column slices.
double slice_doubling_constant(const MeshWeight2D& w, const ExactRational& delta);

/// At every sub-cell of the refined plane: each grid-pair maximal function
/// <= the continuous one and their sum <= 4 M_s (exact); M_s <= C(delta)^2
/// max of the four, or M_s,w <= C(delta)^2 C_dy^(2 log2(4C(delta))) times their sum.
VerificationReport verify_strong_maximal_comparability(const MeshFunction2D& f, const ExactRational& delta,
                                                       const std::optional<MeshWeight2D>& w = std::nullopt);

/// Sup over rectangles of avg_R(w) avg_R(w^(-1/(p-1)))^(p-1) (p = 1: avg_R(w) / min_R w),
/// over all rectangles of at least one cell per side, or over the pair's
/// rectangles at levels 0..L.
double rectangle_ap(const MeshWeight2D& w, double p, const Plane& plane, const std::optional<GridPair>& pair);
double rectangle_ap(const MeshWeight2D& w, double p, const std::optional<GridPair>& pair = std::nullopt);

/// Slice-uniform one-parameter A_p constants per family, with their
/// one-parameter bound, and the rectangle constants with
/// continuous <= C(delta)^(2p) max over the four pairs. Finite p >= 1.
VerificationReport product_weight_check(const MeshWeight2D& w, double p, const ExactRational& delta);

/// || (sum_R (f,h_R)^2 |R|^-1 1_R)^1/2 ||_1 over tensor rectangles of the pair.
double product_h1_dyadic_norm(const MeshFunction2D& f, const GridPair& pair);

/// Square root of product_bmo_dyadic's value.
double product_bmo_norm(const MeshFunction2D& g, const GridPair& pair, const std::vector<OpenSetApprox>& omegas);

/// |<f, g>| / (||f||_H1 ||g||_BMO) over random finite product-Haar pairs.
/// The BMO side is a lower bound, so the ratio is only monitored.
double duality_ratio(std::uint64_t seed, std::size_t pairs, const GridPair& pair,
                     const std::vector<OpenSetApprox>& omegas);

MeshWeight2D tensor_weight(const MeshWeight1D& u, const MeshWeight1D& v);

/// Sum of standard tensor Haar functions with coefficients in [-1, 1].
MeshFunction2D generate_finite_product_haar(std::uint64_t seed, const Domain& first, const Domain& second, int terms);
/// Cell values uniform in [-1, 1].
MeshFunction2D generate_function2d(std::uint64_t seed, const Domain& first, const Domain& second);
/// Union of `steps` mesh-aligned rectangles [x_i, x_i+1) x [y0, y0 + h_i) with
/// decreasing heights, translated to a random origin.
OpenSetApprox generate_staircase(std::uint64_t seed, const Domain& first, const Domain& second, int steps);

}  // namespace dyadic
