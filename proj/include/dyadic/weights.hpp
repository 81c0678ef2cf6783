#pragma once

// Muckenhoupt, reverse Hoelder and doubling constants of mesh weights over
// the continuous interval family and over single grids, and the checks that
// the continuous constants are controlled by the two dyadic ones.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dyadic/mesh.hpp"
#include "dyadic/report.hpp"

namespace dyadic {

struct WeightClass {
  enum class Kind { Ap, RHp, Doubling };
  Kind kind = Kind::Ap;
  double p = 2.0;  // +infinity encodes the p = infinity endpoint

  static WeightClass ap(double p);
  static WeightClass rh(double p);
  static WeightClass doubling() { return WeightClass{Kind::Doubling, 0.0}; }
  /// "a2", "a1", "ainf", "rh2", "rhinf", "rh1", "doubling", or "a<p>" / "rh<p>" for other p.
  static WeightClass parse(const std::string& tag);

  std::string tag() const;
  bool infinite() const { return p == std::numeric_limits<double>::infinity(); }
};

struct ConstantReport {
  WeightClass cls;
  std::string family;  // "continuous", "std", "delta"
  double value = 0.0;
  /// Supremum of the defining functional alone (for RH^d the reported value
  /// also takes the max with the dyadic doubling constant).
  double supremum = 0.0;
  double dyadic_doubling = 0.0;  // set for grid RH reports
  Span argmax;
  std::optional<ArbitraryInterval> argmax_interval;
};

/// Evaluates the defining functionals on breakpoint spans of one partition.
class WeightScanner {
 public:
  WeightScanner(const MeshWeight1D& w, const Partition& part);

  const Partition& partition() const { return *part_; }
  const MeshWeight1D& weight() const { return *w_; }

  /// Value of the class functional on one span (not defined for Doubling).
  double value(const WeightClass& c, const Span& s) const;
  /// Supremum over every span of length >= 2^-L.
  ConstantReport continuous(const WeightClass& c) const;
  /// Supremum over the given spans (normally one grid, all levels).
  ConstantReport over(const WeightClass& c, const std::vector<Span>& spans, const std::string& family) const;

 private:
  struct Tables;
  Tables tables(const WeightClass& c) const;
  ConstantReport continuous_doubling() const;

  const MeshWeight1D* w_;
  const Partition* part_;
  PrefixTable mass_;
};

/// Largest parent-to-child mass ratio over child levels min_child_level..depth.
/// Levels past the mesh resolution are measured on the piecewise-constant
/// weight directly. Torus only.
double dyadic_doubling(const MeshWeight1D& w, const GridSpec& grid, int depth, int min_child_level = 1);

/// Dyadic depth L + ceil(log2 C(delta)) + 3 reached by the descendants the
/// comparable-averages argument uses.
int comparable_depth(const Domain& domain, const Shift& shift);
/// Largest dyadic doubling constant of the standard and shifted grids at that depth.
double grid_doubling_constant(const MeshWeight1D& w, const Shift& shift);

/// Per-weight constants for one class; grids and partition built once per delta.
class IntersectionVerifier {
 public:
  IntersectionVerifier(const Domain& domain, const ExactRational& delta);

  const Partition& partition() const { return part_; }
  const Shift& shift() const { return shift_; }
  /// Dyadic depth used for the doubling constant in the bounds.
  int doubling_depth() const { return depth_; }

  VerificationReport verify(const MeshWeight1D& w, const WeightClass& c) const;
  /// All classes at once, sharing the doubling scans.
  VerificationReport verify(const MeshWeight1D& w, const std::vector<WeightClass>& classes) const;

 private:
  Domain domain_;
  Shift shift_;
  Partition part_;
  GridSpec std_;
  GridSpec shifted_;
  std::vector<Span> std_spans_;
  std::vector<Span> shifted_spans_;
  int depth_ = 0;
};

ConstantReport class_constant(const MeshWeight1D& w, const WeightClass& c, const std::optional<GridSpec>& grid);
VerificationReport verify_intersection(const MeshWeight1D& w, const ExactRational& delta, const WeightClass& c);

/// RH_1 / e <= A_inf over the continuous family; the upper relation is reported only.
VerificationReport rh1_ainfty_relation(const MeshWeight1D& w);

/// Multiplicative cascade on the standard tree: each left child receives a
/// uniform fraction in [1/(1+b), b/(1+b)] of its parent's mass.
MeshWeight1D generate_dyadic_doubling(std::uint64_t seed, const Domain& domain, double ratio_bound);

}  // namespace dyadic
