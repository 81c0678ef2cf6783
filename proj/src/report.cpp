#include "dyadic/report.hpp"

#include <algorithm>
#include <cmath>

namespace dyadic {

double relative_slack(double measured, double bound) {
  if (bound != 0.0) return (bound - measured) / std::fabs(bound);
  return measured <= 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
}

bool within(double measured, double bound, bool exact, double abs_floor) {
  if (measured <= bound) return true;
  if (exact) return false;
  return measured <= bound + std::max(kRelTol * std::fabs(bound), abs_floor);
}

bool Check::record(double measured, double bound, const std::function<std::string()>& describe) {
  ++cases;
  const double s = relative_slack(measured, bound);
  if (cases == 1 || s < worst_slack) {
    worst_slack = s;
    worst_measured = measured;
    worst_bound = bound;
  }
  const bool ok = within(measured, bound, exact, abs_floor) && !std::isnan(measured);
  if (!ok) {
    if (failures == 0 && describe) witness = describe();
    ++failures;
  }
  return ok;
}

bool Check::record_exact(bool holds, double measured, double bound, const std::function<std::string()>& describe) {
  ++cases;
  const double s = relative_slack(measured, bound);
  if (cases == 1 || s < worst_slack) {
    worst_slack = s;
    worst_measured = measured;
    worst_bound = bound;
  }
  if (!holds) {
    if (failures == 0 && describe) witness = describe();
    ++failures;
  }
  return holds;
}

Check& VerificationReport::check(const std::string& check_name, bool exact) {
  for (Check& c : checks) {
    if (c.name == check_name) return c;
  }
  checks.push_back(Check{});
  checks.back().name = check_name;
  checks.back().exact = exact;
  return checks.back();
}

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

void VerificationReport::merge(const VerificationReport& other) {
  for (const Check& o : other.checks) {
    Check& c = check(o.name, o.exact);
    if (o.cases == 0) continue;
    if (c.cases == 0 || o.worst_slack < c.worst_slack) {
      c.worst_slack = o.worst_slack;
      c.worst_measured = o.worst_measured;
      c.worst_bound = o.worst_bound;
    }
    if (c.failures == 0 && o.failures > 0) c.witness = o.witness;
    c.cases += o.cases;
    c.failures += o.failures;
  }
  for (const auto& [k, v] : other.constants) {
    auto it = constants.find(k);
    if (it == constants.end() || v > it->second) constants[k] = v;
  }
  notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

namespace {

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::ordered_json VerificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["pass"] = pass();
  j["parameters"] = parameters;
  nlohmann::ordered_json cs = nlohmann::ordered_json::object();
  for (const auto& [k, v] : constants) cs[k] = number(v);
  j["constants"] = cs;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Check& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["exact"] = c.exact;
    e["cases"] = c.cases;
    e["failures"] = c.failures;
    e["measured"] = number(c.worst_measured);
    e["bound"] = number(c.worst_bound);
    e["slack"] = number(c.worst_slack);
    if (!c.witness.empty()) e["witness"] = c.witness;
    e["pass"] = c.pass();
    arr.push_back(e);
  }
  j["checks"] = arr;
  if (!notes.empty()) j["notes"] = notes;
  return j;
}

}  // namespace dyadic
