#include "dyadic/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <future>
#include <sstream>

#include "dyadic/covering.hpp"
#include "dyadic/haar.hpp"
#include "dyadic/maximal_hardy.hpp"
#include "dyadic/product.hpp"
#include "dyadic/random.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {

namespace {

using Json = nlohmann::ordered_json;

const std::vector<double> kRatioBounds = {1.5, 2.0, 3.0, 5.0};

// Per-delta accumulation of one kind of report, plus the inputs of failures.
class Collector {
 public:
  explicit Collector(std::string suite) : suite_(std::move(suite)) {}

  void add(const std::string& key, const VerificationReport& r, const std::function<Json()>& input) {
    auto it = std::find_if(merged_.begin(), merged_.end(), [&](const auto& p) { return p.first == key; });
    if (it == merged_.end()) {
      VerificationReport base;
      base.name = r.name;
      base.parameters = r.parameters;
      merged_.emplace_back(key, base);
      it = merged_.end() - 1;
    }
    it->second.merge(r);
    counts_[key] += 1;
    if (!r.pass()) {
      Json f;
      f["report"] = key;
      Json failed = Json::array();
      for (const Check& c : r.checks) {
        if (!c.pass()) failed.push_back({{"check", c.name}, {"witness", c.witness}});
      }
      f["checks"] = failed;
      f["parameters"] = r.parameters;
      f["input"] = input();
      failures_.push_back(f);
    }
  }

  bool pass() const {
    return std::all_of(merged_.begin(), merged_.end(), [](const auto& p) { return p.second.pass(); });
  }

  Json to_json(const SuiteConfig& cfg) const {
    Json j;
    j["schema"] = kReportSchema;
    j["suite"] = suite_;
    j["timestamp"] = utc_timestamp();
    j["config"] = cfg.to_json();
    j["pass"] = pass();
    Json arr = Json::array();
    for (const auto& [key, rep] : merged_) {
      Json e = rep.to_json();
      e["key"] = key;
      e["runs"] = counts_.at(key);
      arr.push_back(e);
    }
    j["reports"] = arr;
    j["failures"] = failures_;
    return j;
  }

 private:
  std::string suite_;
  std::vector<std::pair<std::string, VerificationReport>> merged_;
  std::map<std::string, std::size_t> counts_;
  Json failures_ = Json::array();
};

Json function_json(const MeshFunction1D& f) { return Json::parse(to_json(f)); }
Json function_json(const MeshFunction2D& f) { return Json::parse(to_json(f)); }

MeshFunction1D test_function(std::uint64_t seed, const Domain& dom, int i) {
  if (i % 6 == 5) {
    // Indicator of a random arc.
    Rng rng(seed);
    const std::size_t n = dom.cells();
    const std::size_t a = static_cast<std::size_t>(rng.integer(0, static_cast<long>(n) - 1));
    const std::size_t len = static_cast<std::size_t>(rng.integer(1, static_cast<long>(n) / 2));
    std::vector<double> v(n, 0.0);
    for (std::size_t t = 0; t < len; ++t) v[(a + t) % n] = 1.0;
    return MeshFunction1D::make(dom, v);
  }
  return generate_finite_haar(seed, dom, 4 + i % 12);
}

SuiteOutcome covering_suite(const SuiteConfig& cfg) {
  Collector col("covering");
  const Domain torus = Domain::torus(cfg.level);
  const Domain line = Domain::line(cfg.window, 2);
  for (const ExactRational& d : cfg.deltas) {
    const std::string tag = d.str();
    col.add("cover/" + tag, verify_cover_exhaustive(torus, d), [] { return Json(); });
    col.add("shift-necessity/" + tag, verify_shift_necessity(line, d), [] { return Json(); });
    col.add("separation/" + tag, verify_separation(d, -10, 10), [] { return Json(); });
  }
  Json extra = Json::array();
  for (const ExactRational& d : cfg.deltas) {
    extra.push_back({{"delta", d.str()},
                     {"d(delta)", relative_distance(d).str()},
                     {"C(delta)", covering_constant(d).str()}});
  }
  SuiteOutcome out{"covering", col.pass(), col.to_json(cfg), ""};
  out.report["constants"] = extra;
  return out;
}

SuiteOutcome weights_suite(const SuiteConfig& cfg) {
  Collector col("weights");
  const Domain torus = Domain::torus(cfg.level);
  const std::vector<WeightClass> classes = {WeightClass::ap(1), WeightClass::ap(2), WeightClass::ap(4),
                                            WeightClass::ap(std::numeric_limits<double>::infinity()),
                                            WeightClass::rh(2), WeightClass::rh(std::numeric_limits<double>::infinity()),
                                            WeightClass::rh(1), WeightClass::doubling()};
  std::ostringstream csv;
  csv.precision(17);
  csv << "weight,delta,class,continuous,std,delta_grid,bound\n";
  for (const ExactRational& d : cfg.deltas) {
    const IntersectionVerifier verifier(torus, d);
    for (int i = 0; i < cfg.weights; ++i) {
      const std::uint64_t seed = cfg.seed * 1000003 + static_cast<std::uint64_t>(i);
      const MeshWeight1D w = generate_dyadic_doubling(seed, torus, kRatioBounds[i % kRatioBounds.size()]);
      const VerificationReport r = verifier.verify(w, classes);
      col.add("intersection/" + d.str(), r, [&] { return function_json(w.function()); });
      for (const WeightClass& c : classes) {
        const std::string t = c.tag();
        auto get = [&](const std::string& k) {
          auto it = r.constants.find(t + "." + k);
          return it == r.constants.end() ? std::nan("") : it->second;
        };
        csv << seed << ',' << d.str() << ',' << t << ',' << get("continuous") << ',' << get("std") << ','
            << get("delta") << ',' << get("bound") << '\n';
      }
    }
  }
  for (int i = 0; i < cfg.weights; ++i) {
    const std::uint64_t seed = cfg.seed * 1000003 + static_cast<std::uint64_t>(i);
    const MeshWeight1D w = generate_dyadic_doubling(seed, torus, kRatioBounds[i % kRatioBounds.size()]);
    col.add("rh1-ainfty", rh1_ainfty_relation(w), [&] { return function_json(w.function()); });
  }
  return SuiteOutcome{"weights", col.pass(), col.to_json(cfg), csv.str()};
}

SuiteOutcome bmo_suite(const SuiteConfig& cfg) {
  Collector col("bmo");
  const Domain torus = Domain::torus(cfg.level);
  double k_emp = 0.0;
  for (int i = 0; i < cfg.functions; ++i) {
    const MeshFunction1D f = test_function(cfg.seed * 2000003 + static_cast<std::uint64_t>(i), torus, i);
    auto input = [&] { return function_json(f); };
    for (const ExactRational& d : cfg.deltas) {
      const VerificationReport r = verify_bmo_intersection(f, d, cfg.k_cap);
      k_emp = std::max(k_emp, r.constants.at("K_emp"));
      col.add("intersection/" + d.str(), r, input);
      col.add("parseval/delta", parseval_check(f, GridSpec::shifted(d, torus)), input);
    }
    col.add("parseval/std", parseval_check(f, GridSpec::standard(torus)), input);
  }
  SuiteOutcome out{"bmo", col.pass(), col.to_json(cfg), ""};
  out.report["K_emp"] = k_emp;
  out.report["K_cap"] = cfg.k_cap;
  return out;
}

SuiteOutcome vmo_suite(const SuiteConfig& cfg) {
  Collector col("vmo");
  const Domain torus = Domain::torus(std::min(cfg.level, 8));
  const Domain line = Domain::line(cfg.window, 3);
  for (int i = 0; i < cfg.functions; ++i) {
    const std::uint64_t seed = cfg.seed * 3000017 + static_cast<std::uint64_t>(i);
    const MeshFunction1D f = generate_finite_haar(seed, torus, 4 + i % 12);
    col.add("truncation/torus", verify_truncation(f), [&] { return function_json(f); });
    const MeshFunction1D g = generate_finite_haar(seed, line, 4 + i % 12);
    col.add("truncation/line", verify_truncation(g), [&] { return function_json(g); });
  }
  return SuiteOutcome{"vmo", col.pass(), col.to_json(cfg), ""};
}

SuiteOutcome maximal_suite(const SuiteConfig& cfg) {
  Collector col("maximal");
  const Domain torus = Domain::torus(cfg.level);
  for (int i = 0; i < cfg.functions; ++i) {
    const std::uint64_t seed = cfg.seed * 4000037 + static_cast<std::uint64_t>(i);
    const MeshFunction1D f = test_function(seed, torus, i);
    const MeshWeight1D w = generate_dyadic_doubling(seed + 1, torus, kRatioBounds[i % kRatioBounds.size()]);
    for (const ExactRational& d : cfg.deltas) {
      col.add("maximal/" + d.str(), verify_maximal_comparability(f, d), [&] { return function_json(f); });
      col.add("weighted-maximal/" + d.str(), verify_maximal_comparability(f, d, w), [&] {
        return Json{{"function", function_json(f)}, {"weight", function_json(w.function())}};
      });
    }
  }
  // Atoms: each delta gets its own weights; C_dy is measured once per weight.
  for (const ExactRational& d : cfg.deltas) {
    const Shift shift = Shift::make(d);
    for (int k = 0; k < 4; ++k) {
      const std::uint64_t wseed = cfg.seed * 5000011 + static_cast<std::uint64_t>(k);
      const MeshWeight1D w = generate_dyadic_doubling(wseed, torus, kRatioBounds[k % kRatioBounds.size()]);
      const double cdy = grid_doubling_constant(w, shift);
      Rng rng(wseed);
      AtomicDecomposition dec;
      VerificationReport atoms;
      atoms.name = "atom-rescale";
      atoms.parameters["delta"] = d.str();
      Check& valid = atoms.check("rescaled atom is a grid atom", true);
      Check& size = atoms.check("rescaled ||a||_L2(w) <= w(I)^-1/2", false);
      const int per_weight = (cfg.atoms + 3) / 4;
      Json witness_atom;
      for (int a = 0; a < per_weight; ++a) {
        const Atom atom = generate_atom(wseed * 131 + static_cast<std::uint64_t>(a), w);
        const RescaledAtom r = atom_rescale(atom, w, shift, cdy);
        const bool ok = r.validation.pass();
        if (!ok && witness_atom.is_null()) witness_atom = function_json(atom.function());
        valid.record_exact(ok, ok ? 0.0 : 1.0, 0.0, [&] { return "atom " + std::to_string(a) + ": " + r.validation.reason; });
        size.record(r.validation.l2, r.validation.l2_bound);
        dec.entries.push_back({rng.uniform(-1.0, 1.0), atom});
      }
      auto input = [&] { return Json{{"weight", function_json(w.function())}, {"atom", witness_atom}}; };
      col.add("atoms/" + d.str(), atoms, input);
      col.add("decomposition/" + d.str(), verify_decomposition(dec, w, d),
              [&] { return Json{{"weight", function_json(w.function())}}; });
    }
  }
  return SuiteOutcome{"maximal", col.pass(), col.to_json(cfg), ""};
}

SuiteOutcome product_suite(const SuiteConfig& cfg) {
  Collector col("product");
  const Domain t = Domain::torus(cfg.level2d);
  std::vector<OpenSetApprox> sets;
  for (int s = 0; s < cfg.open_sets; ++s) {
    sets.push_back(generate_staircase(cfg.seed * 6000047 + static_cast<std::uint64_t>(s), t, t, 1 + s % 6));
  }
  double k_emp = 0.0;
  for (int i = 0; i < cfg.functions2d; ++i) {
    const std::uint64_t seed = cfg.seed * 7000003 + static_cast<std::uint64_t>(i);
    const MeshFunction2D f = i % 2 ? generate_finite_product_haar(seed, t, t, 8) : generate_function2d(seed, t, t);
    const MeshWeight2D w = tensor_weight(generate_dyadic_doubling(seed + 1, t, kRatioBounds[i % 4]),
                                         generate_dyadic_doubling(seed + 2, t, kRatioBounds[(i + 1) % 4]));
    auto input = [&] { return function_json(f); };
    for (const ExactRational& d : cfg.deltas) {
      col.add("strong-maximal/" + d.str(), verify_strong_maximal_comparability(f, d), input);
      col.add("weighted-strong-maximal/" + d.str(), verify_strong_maximal_comparability(f, d, w),
              [&] { return Json{{"function", function_json(f)}, {"weight", function_json(w.function())}}; });
      col.add("parseval/" + d.str(), parseval2_check(f, d), input);
      col.add("bmo/" + d.str(), verify_product_bmo(f, d, sets), input);
      for (double p : {1.0, 2.0}) {
        col.add("weights/" + d.str(), product_weight_check(w, p, d), [&] { return function_json(w.function()); });
      }
    }
    for (const GridPair& pair : GridPair::all(t, t, cfg.deltas.front())) {
      k_emp = std::max(k_emp, duality_ratio(seed, 4, pair, sets));
    }
  }
  SuiteOutcome out{"product", col.pass(), col.to_json(cfg), ""};
  out.report["duality K_emp"] = k_emp;
  out.report["notes"] = Json::array(
      {"product BMO values are maxima over the supplied staircases and single rectangles (lower bounds)",
       "duality K_emp is monitored, not asserted"});
  return out;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

}  // namespace

std::vector<ExactRational> SuiteConfig::default_deltas() {
  return {ExactRational(1, 3), ExactRational(1, 5), ExactRational(2, 5), ExactRational(1, 7)};
}

std::vector<std::string> SuiteConfig::all_suites() { return {"covering", "weights", "bmo", "vmo", "maximal", "product"}; }

void SuiteConfig::validate() const {
  if (deltas.empty()) throw ConfigError("at least one delta is required");
  for (const ExactRational& d : deltas) {
    if (d <= ExactRational(0) || d >= ExactRational(1)) throw ConfigError("delta " + d.str() + " is not in (0, 1)");
    if (relative_distance(d).is_zero()) throw ConfigError("delta " + d.str() + " has d(delta) = 0");
  }
  if (level < 2 || level > 12) throw ConfigError("level must be in [2, 12]");
  if (window < 1 || window > 10) throw ConfigError("window must be in [1, 10]");
  if (level2d < 1 || level2d > kMaxLevel2D) {
    throw ConfigError("2D level must be in [1, " + std::to_string(kMaxLevel2D) + "]");
  }
  if (!(k_cap > 0.0)) throw ConfigError("K_cap must be positive");
  for (int n : {weights, functions, atoms, functions2d, open_sets}) {
    if (n < 1) throw ConfigError("sample counts must be positive");
  }
  if (suites.empty()) throw ConfigError("no suite selected");
  const std::vector<std::string> known = all_suites();
  for (const std::string& s : suites) {
    if (std::find(known.begin(), known.end(), s) == known.end()) throw ConfigError("unknown suite " + s);
  }
}

nlohmann::ordered_json SuiteConfig::to_json() const {
  Json j;
  Json ds = Json::array();
  for (const ExactRational& d : deltas) ds.push_back(d.str());
  j["deltas"] = ds;
  j["level"] = level;
  j["window"] = window;
  j["level2d"] = level2d;
  j["seed"] = seed;
  j["suites"] = suites;
  j["K_cap"] = k_cap;
  j["weights"] = weights;
  j["functions"] = functions;
  j["atoms"] = atoms;
  j["functions2d"] = functions2d;
  j["open_sets"] = open_sets;
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::ordered_json without_timestamps(nlohmann::ordered_json j) {
  if (j.is_object()) {
    j.erase("timestamp");
    for (auto& [k, v] : j.items()) v = without_timestamps(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = without_timestamps(v);
  }
  return j;
}

SuiteRun run_suite(const SuiteConfig& cfg) {
  cfg.validate();
  using Runner = SuiteOutcome (*)(const SuiteConfig&);
  const std::map<std::string, Runner> runners = {{"covering", covering_suite}, {"weights", weights_suite},
                                                 {"bmo", bmo_suite},           {"vmo", vmo_suite},
                                                 {"maximal", maximal_suite},   {"product", product_suite}};
  std::vector<std::string> order;
  for (const std::string& s : SuiteConfig::all_suites()) {
    if (std::find(cfg.suites.begin(), cfg.suites.end(), s) != cfg.suites.end()) order.push_back(s);
  }

  SuiteRun run;
  if (cfg.parallel) {
    std::vector<std::future<SuiteOutcome>> jobs;
    for (const std::string& s : order) jobs.push_back(std::async(std::launch::async, runners.at(s), std::cref(cfg)));
    for (auto& j : jobs) run.suites.push_back(j.get());
  } else {
    for (const std::string& s : order) run.suites.push_back(runners.at(s)(cfg));
  }

  Json summary;
  summary["schema"] = kReportSchema;
  summary["timestamp"] = utc_timestamp();
  summary["config"] = cfg.to_json();
  Json results = Json::object();
  bool all = true;
  for (const SuiteOutcome& o : run.suites) {
    results[o.name] = o.pass;
    all = all && o.pass;
  }
  summary["suites"] = results;
  summary["pass"] = all;
  run.summary = summary;
  run.exit_code = all ? 0 : 1;

  if (!cfg.output_dir.empty()) {
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    for (const SuiteOutcome& o : run.suites) {
      write_file(dir / (o.name + ".json"), o.report.dump(2) + "\n");
      if (!o.csv.empty()) write_file(dir / (o.name + "_constants.csv"), o.csv);
    }
    write_file(dir / "summary.json", summary.dump(2) + "\n");
  }
  return run;
}

}  // namespace dyadic
