#pragma once

// Verification records shared by every verifier.

#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace dyadic {

/// Relative tolerance for inequalities between floating-point quantities.
inline constexpr double kRelTol = 1e-9;
/// Relative tolerance for Parseval-type identities.
inline constexpr double kIdentityTol = 1e-12;

/// One inequality "measured <= bound", evaluated over many cases; keeps the
/// tightest case and the first failure.
struct Check {
  std::string name;
  bool exact = false;  // no tolerance allowed
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst_measured = 0.0;
  double worst_bound = 0.0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::string witness;  // first failing case, if any
  /// Absolute slack allowed on top of the relative tolerance, for quantities
  /// that can vanish (set from the data's scale).
  double abs_floor = 0.0;

  /// Returns whether this case passed. `describe` is only called on failure.
  bool record(double measured, double bound, const std::function<std::string()>& describe = {});
  /// Same bookkeeping, but the outcome is `holds` (decided exactly by the
  /// caller); measured and bound only feed the slack statistics.
  bool record_exact(bool holds, double measured, double bound, const std::function<std::string()>& describe = {});
  bool pass() const { return failures == 0; }
};

/// (bound - measured) / |bound|, or 0 / -inf when the bound is zero.
double relative_slack(double measured, double bound);
/// measured <= bound, allowing max(kRelTol |bound|, abs_floor) slack unless exact.
bool within(double measured, double bound, bool exact, double abs_floor = 0.0);

struct VerificationReport {
  std::string name;
  std::map<std::string, std::string> parameters;
  std::map<std::string, double> constants;
  std::deque<Check> checks;  // references stay valid as checks are added
  std::vector<std::string> notes;

  Check& check(const std::string& check_name, bool exact);
  bool pass() const;
  void merge(const VerificationReport& other);  // checks with equal names are combined
  nlohmann::ordered_json to_json() const;
};

}  // namespace dyadic
