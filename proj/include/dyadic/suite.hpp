#pragma once

// Batch verification runs over generated data, with JSON reports.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyadic/exact.hpp"
#include "json.hpp"

namespace dyadic {

/// Invalid run configuration (reported as a usage error).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kReportSchema = 1;
inline constexpr int kMaxLevel2D = 5;

struct SuiteConfig {
  std::vector<ExactRational> deltas = default_deltas();
  int level = 8;      // 1D torus level
  int window = 6;     // line window [-2^M, 2^M)
  int level2d = 4;    // per-factor level of the product suite
  std::uint64_t seed = 7;
  std::vector<std::string> suites = all_suites();
  double k_cap = 64.0;
  int weights = 24;
  int functions = 24;
  int atoms = 24;
  int functions2d = 4;
  int open_sets = 24;
  bool parallel = true;
  std::string output_dir;  // reports are written here when set

  static std::vector<ExactRational> default_deltas();
  static std::vector<std::string> all_suites();  // covering, weights, bmo, vmo, maximal, product

  /// Throws ConfigError for values no suite can run with.
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

struct SuiteOutcome {
  std::string name;
  bool pass = false;
  nlohmann::ordered_json report;
  std::string csv;  // constant table, when the suite has one
};

struct SuiteRun {
  std::vector<SuiteOutcome> suites;
  nlohmann::ordered_json summary;
  int exit_code = 0;  // 0 when every check passed, 1 otherwise
};

/// Runs the selected suites (concurrently when cfg.parallel) and writes
/// <suite>.json, summary.json and weights_constants.csv into cfg.output_dir.
SuiteRun run_suite(const SuiteConfig& cfg);

/// A report with every "timestamp" field removed, for comparing runs.
nlohmann::ordered_json without_timestamps(nlohmann::ordered_json j);

std::string utc_timestamp();

}  // namespace dyadic
