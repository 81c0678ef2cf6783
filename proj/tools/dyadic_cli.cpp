// Command-line front end. Exit codes: 0 all checks pass, 1 a check failed,
// 2 usage error or invalid input, 3 I/O failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dyadic/covering.hpp"
#include "dyadic/haar.hpp"
#include "dyadic/maximal_hardy.hpp"
#include "dyadic/product.hpp"
#include "dyadic/suite.hpp"
#include "dyadic/weights.hpp"
#include "json.hpp"

using namespace dyadic;
using Json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

ExactRational parse_rational(const std::string& s) {
  try {
    return ExactRational::parse(s);
  } catch (const std::exception& e) {
    throw UsageError("not a rational: " + s);
  }
}

// A delta every grid can use: 0 < delta < 1 and d(delta) > 0.
ExactRational parse_delta(const std::string& s) {
  const ExactRational d = parse_rational(s);
  if (d <= ExactRational(0) || d >= ExactRational(1)) throw UsageError("delta must lie in (0, 1): " + s);
  if (relative_distance(d).is_zero()) throw UsageError("d(" + s + ") = 0: delta is a dyadic rational");
  return d;
}

Domain make_domain(const std::string& kind, int level, int window) {
  if (kind == "torus") return Domain::torus(level);
  if (kind == "line") return Domain::line(window, level);
  throw UsageError("domain must be torus or line");
}

MeshWeight1D load_weight(const std::string& path) {
  const MeshFunction1D f = function_from_json(read_file(path));
  return MeshWeight1D::make(f.domain, f.values);
}

MeshWeight2D load_weight2d(const std::string& path) {
  const MeshFunction2D f = function2d_from_json(read_file(path));
  return MeshWeight2D::make(f.first, f.second, f.values);
}

void check_level2d(const MeshFunction2D& f) {
  const int level = std::max(f.first.finest, f.second.finest);
  if (level > kMaxLevel2D) {
    throw UsageError("2D level " + std::to_string(level) + " exceeds the cap " + std::to_string(kMaxLevel2D));
  }
  if (level == kMaxLevel2D) std::cerr << "warning: 2D level " << level << " is slow (cap " << kMaxLevel2D << ")\n";
}

Json id_json(const IntervalId& id) {
  const Interval iv = interval(id);
  return {{"grid", id.grid.tag()},
          {"level", id.level},
          {"index", id.index.get_str()},
          {"left", iv.left.str()},
          {"length", iv.length.to_rational().str()}};
}

// Prints the report, dumps failing checks to stderr and returns the exit code.
int finish(const VerificationReport& rep, const std::string& out, const Json& input = Json()) {
  Json j;
  j["schema"] = kReportSchema;
  j["timestamp"] = utc_timestamp();
  j["report"] = rep.to_json();
  if (!rep.pass()) {
    Json failures = Json::array();
    for (const Check& c : rep.checks) {
      if (!c.pass()) failures.push_back({{"check", c.name}, {"witness", c.witness}});
    }
    j["failures"] = failures;
    if (!input.is_null()) j["input"] = input;
    for (const auto& f : failures) {
      std::cerr << "FAIL " << f["check"].get<std::string>() << ": " << f["witness"].get<std::string>() << '\n';
    }
  }
  write_output(out, j.dump(2) + "\n");
  return rep.pass() ? 0 : 1;
}

std::vector<OpenSetApprox> staircases(std::uint64_t seed, const Domain& a, const Domain& b, int count) {
  std::vector<OpenSetApprox> sets;
  for (int s = 0; s < count; ++s) sets.push_back(generate_staircase(seed + static_cast<std::uint64_t>(s), a, b, 1 + s % 6));
  return sets;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic and shifted dyadic grids: covering, weights, BMO, maximal functions"};
  app.require_subcommand(1);

  // d-of-delta
  std::string d_delta;
  auto* d_cmd = app.add_subcommand("d-of-delta", "Print d(delta) = inf_n dist(2^n delta, Z)");
  d_cmd->add_option("delta", d_delta, "p/q")->required();
  bool d_covering = false;
  d_cmd->add_flag("--covering", d_covering, "Also print C(delta) = 2 / d(delta)");

  // cover
  std::string c_delta, c_left, c_len, c_domain = "torus";
  int c_level = 10, c_window = 6;
  bool c_naive = false, c_inner = false;
  auto* cover_cmd = app.add_subcommand("cover", "Cover an interval by a standard or shifted grid interval");
  cover_cmd->add_option("--delta", c_delta)->required();
  cover_cmd->add_option("--left", c_left)->required();
  cover_cmd->add_option("--len", c_len)->required();
  cover_cmd->add_option("--domain", c_domain)->check(CLI::IsMember({"torus", "line"}));
  cover_cmd->add_option("--level", c_level, "Finest level L");
  cover_cmd->add_option("--window", c_window, "Line window [-2^M, 2^M)");
  cover_cmd->add_flag("--naive", c_naive, "Plain translate by delta (line only)");
  cover_cmd->add_flag("--inner", c_inner, "Largest grid interval inside instead");

  // grid show
  std::string g_delta = "1/3", g_domain = "torus";
  int g_level = 2, g_finest = 4, g_window = 6;
  auto* grid_cmd = app.add_subcommand("grid", "Grid inspection");
  grid_cmd->require_subcommand(1);
  auto* grid_show = grid_cmd->add_subcommand("show", "Endpoints of A_n and A_n^delta");
  grid_show->add_option("--delta", g_delta);
  grid_show->add_option("--n", g_level, "Grid level n")->required();
  grid_show->add_option("--level", g_finest, "Finest level L of the domain");
  grid_show->add_option("--domain", g_domain)->check(CLI::IsMember({"torus", "line"}));
  grid_show->add_option("--window", g_window);

  // weights verify
  std::string w_class, w_delta, w_input, w_report;
  auto* weights_cmd = app.add_subcommand("weights", "Weight class constants");
  weights_cmd->require_subcommand(1);
  auto* weights_verify = weights_cmd->add_subcommand("verify", "Continuous constant against the two grids");
  weights_verify->add_option("--class", w_class, "a1|a2|a4|ainf|rh2|rhinf|rh1|doubling")->required();
  weights_verify->add_option("--delta", w_delta)->required();
  weights_verify->add_option("--input", w_input, "Weight JSON")->required();
  weights_verify->add_option("--report", w_report, "Report path (default stdout)");

  // bmo
  std::string b_mode = "avg", b_grid = "std", b_delta = "1/3", b_input, b_out;
  bool b_verify = false;
  double b_cap = 64.0;
  auto* bmo_cmd = app.add_subcommand("bmo", "Dyadic or continuous BMO norm of a mesh function");
  bmo_cmd->add_option("--mode", b_mode)->check(CLI::IsMember({"avg", "carleson"}));
  bmo_cmd->add_option("--grid", b_grid)->check(CLI::IsMember({"std", "delta", "continuous"}));
  bmo_cmd->add_option("--delta", b_delta);
  bmo_cmd->add_option("--input", b_input)->required();
  bmo_cmd->add_flag("--verify", b_verify, "Run the two-grid comparison instead");
  bmo_cmd->add_option("--k-cap", b_cap);
  bmo_cmd->add_option("--report", b_out);

  // maximal verify
  std::string m_delta, m_weight, m_input, m_out;
  auto* maximal_cmd = app.add_subcommand("maximal", "Hardy-Littlewood maximal functions");
  maximal_cmd->require_subcommand(1);
  auto* maximal_verify = maximal_cmd->add_subcommand("verify", "Pointwise comparability with the two grids");
  maximal_verify->add_option("--delta", m_delta)->required();
  maximal_verify->add_option("--weight", m_weight, "Weight JSON (torus)");
  maximal_verify->add_option("--input", m_input, "Function JSON")->required();
  maximal_verify->add_option("--report", m_out);

  // product verify
  std::string p_which, p_delta, p_input, p_weight, p_out;
  double p_p = 2.0;
  int p_sets = 100;
  std::uint64_t p_seed = 7;
  auto* product_cmd = app.add_subcommand("product", "Two-parameter checks on the torus squared");
  product_cmd->require_subcommand(1);
  auto* product_verify = product_cmd->add_subcommand("verify", "Run one product check");
  product_verify->add_option("--which", p_which)
      ->required()
      ->check(CLI::IsMember({"strong-maximal", "bmo", "weights", "h1"}));
  product_verify->add_option("--delta", p_delta)->required();
  product_verify->add_option("--input", p_input, "2D function JSON (the weight for --which weights)")->required();
  product_verify->add_option("--weight", p_weight, "2D weight JSON for the weighted strong maximal check");
  product_verify->add_option("--p", p_p, "A_p exponent for --which weights");
  product_verify->add_option("--sets", p_sets, "Number of staircase open sets");
  product_verify->add_option("--seed", p_seed);
  product_verify->add_option("--report", p_out);

  // generate
  std::uint64_t gen_seed = 7;
  int gen_level = 8, gen_window = 6, gen_terms = 12;
  double gen_ratio = 3.0;
  std::string gen_domain = "torus", gen_out;
  bool gen_2d = false;
  auto* gen_cmd = app.add_subcommand("generate", "Generate test data as JSON");
  gen_cmd->require_subcommand(1);
  auto* gen_weight = gen_cmd->add_subcommand("weight", "Dyadic-doubling cascade weight");
  auto* gen_function = gen_cmd->add_subcommand("function", "Finite Haar sum");
  for (auto* sc : {gen_weight, gen_function}) {
    sc->add_option("--seed", gen_seed);
    sc->add_option("--level", gen_level);
    sc->add_option("--domain", gen_domain)->check(CLI::IsMember({"torus", "line"}));
    sc->add_option("--window", gen_window);
    sc->add_flag("--2d", gen_2d, "Torus squared");
    sc->add_option("--out", gen_out);
  }
  gen_weight->add_option("--ratio", gen_ratio, "Child mass ratio bound b > 1");
  gen_function->add_option("--terms", gen_terms);

  // verify
  SuiteConfig cfg;
  std::string v_suite;
  std::vector<std::string> v_deltas;
  bool v_serial = false;
  auto* verify_cmd = app.add_subcommand("verify", "Run verification suites and write reports");
  verify_cmd->add_option("suite", v_suite, "all | covering | weights | bmo | vmo | maximal | product")->required();
  verify_cmd->add_option("--delta", v_deltas, "Repeatable; default 1/3 1/5 2/5 1/7");
  verify_cmd->add_option("--level", cfg.level);
  verify_cmd->add_option("--window", cfg.window);
  verify_cmd->add_option("--level2d", cfg.level2d);
  verify_cmd->add_option("--seed", cfg.seed);
  verify_cmd->add_option("--k-cap", cfg.k_cap);
  verify_cmd->add_option("--weights", cfg.weights);
  verify_cmd->add_option("--functions", cfg.functions);
  verify_cmd->add_option("--atoms", cfg.atoms);
  verify_cmd->add_option("--functions2d", cfg.functions2d);
  verify_cmd->add_option("--open-sets", cfg.open_sets);
  verify_cmd->add_option("--out", cfg.output_dir, "Report directory")->default_val("reports");
  verify_cmd->add_flag("--serial", v_serial, "Run suites one after another");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*d_cmd) {
      const ExactRational delta = parse_rational(d_delta);
      std::cout << relative_distance(delta).str() << '\n';
      if (d_covering) {
        if (relative_distance(delta).is_zero()) throw UsageError("C(delta) is undefined when d(delta) = 0");
        std::cout << covering_constant(delta).str() << '\n';
      }
      return 0;
    }

    if (*cover_cmd) {
      const ExactRational delta = parse_delta(c_delta);
      const Domain dom = make_domain(c_domain, c_level, c_window);
      const ArbitraryInterval q{parse_rational(c_left), parse_rational(c_len), dom};
      if (q.length <= ExactRational(0)) throw UsageError("--len must be positive");
      Json j;
      j["delta"] = delta.str();
      j["Q"] = {{"left", q.left.str()}, {"length", q.length.str()}};
      if (c_naive) {
        if (dom.is_torus()) throw UsageError("--naive needs --domain line");
        const auto found = cover_naive(q, delta, c_window);
        j["cover"] = found ? id_json(found->id) : Json();
        j["ratio"] = found ? Json(found->ratio.str()) : Json();
      } else {
        const Cover c = c_inner ? inner(q, delta) : cover(q, delta);
        j["cover"] = id_json(c.id);
        j["ratio"] = c.ratio.str();
      }
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*grid_show) {
      const ExactRational delta = parse_delta(g_delta);
      const Domain dom = make_domain(g_domain, g_finest, g_window);
      if (g_level < dom.min_level() || g_level > dom.max_level()) throw UsageError("--n outside the domain's levels");
      Json j;
      j["n"] = g_level;
      for (const GridSpec& g : {GridSpec::standard(dom), GridSpec::shifted(delta, dom)}) {
        Json pts = Json::array();
        for (const ExactRational& x : endpoint_set(g, g_level)) pts.push_back(x.str());
        j[g.tag()] = {{"offset", g.offset(g_level).str()}, {"endpoints", pts}};
      }
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*weights_verify) {
      const ExactRational delta = parse_delta(w_delta);
      WeightClass cls;
      try {
        cls = WeightClass::parse(w_class);
      } catch (const std::exception&) {
        throw UsageError("unknown weight class " + w_class);
      }
      const MeshWeight1D w = load_weight(w_input);
      const VerificationReport rep = IntersectionVerifier(w.domain, delta).verify(w, cls);
      const std::string tag = cls.tag();
      double slack = std::numeric_limits<double>::infinity();
      for (const Check& c : rep.checks) slack = std::min(slack, c.worst_slack);
      Json j;
      j["schema"] = kReportSchema;
      j["class"] = tag;
      j["delta"] = delta.str();
      j["constants"] = {{"continuous", rep.constants.at(tag + ".continuous")},
                        {"std", rep.constants.at(tag + ".std")},
                        {"shifted", rep.constants.at(tag + ".delta")}};
      j["bound"] = rep.constants.at(tag + ".bound");
      j["pass"] = rep.pass();
      j["slack"] = slack;
      j["report"] = rep.to_json();
      if (!rep.pass()) j["input"] = Json::parse(to_json(w.function()));
      write_output(w_report, j.dump(2) + "\n");
      return rep.pass() ? 0 : 1;
    }

    if (*bmo_cmd) {
      const MeshFunction1D f = function_from_json(read_file(b_input));
      if (b_verify) {
        return finish(verify_bmo_intersection(f, parse_delta(b_delta), b_cap), b_out, Json::parse(to_json(f)));
      }
      BMOReport r;
      if (b_grid == "continuous") {
        if (b_mode != "avg") throw UsageError("the continuous family has no Carleson mode");
        r = bmo_continuous(f);
      } else {
        const GridSpec g = b_grid == "std" ? GridSpec::standard(f.domain) : GridSpec::shifted(parse_delta(b_delta), f.domain);
        r = bmo_dyadic(f, g, b_mode == "avg" ? BMOMode::Avg : BMOMode::Carleson);
      }
      Json j;
      j["family"] = r.family;
      j["mode"] = b_mode;
      j["value"] = r.value;
      j["norm_avg"] = r.norm_avg;
      j["norm_p2"] = r.norm_p2;
      if (r.norm_carleson) j["norm_carleson"] = *r.norm_carleson;
      if (r.argmax_interval) {
        j["argmax"] = {{"left", r.argmax_interval->left.str()}, {"length", r.argmax_interval->length.str()}};
      }
      write_output(b_out, j.dump(2) + "\n");
      return 0;
    }

    if (*maximal_verify) {
      const ExactRational delta = parse_delta(m_delta);
      const MeshFunction1D f = function_from_json(read_file(m_input));
      std::optional<MeshWeight1D> w;
      Json input = {{"function", Json::parse(to_json(f))}};
      if (!m_weight.empty()) {
        w = load_weight(m_weight);
        input["weight"] = Json::parse(to_json(w->function()));
      }
      return finish(verify_maximal_comparability(f, delta, w), m_out, input);
    }

    if (*product_verify) {
      const ExactRational delta = parse_delta(p_delta);
      if (p_which == "weights") {
        const MeshWeight2D w = load_weight2d(p_input);
        check_level2d(w.function());
        return finish(product_weight_check(w, p_p, delta), p_out, Json::parse(to_json(w.function())));
      }
      const MeshFunction2D f = function2d_from_json(read_file(p_input));
      check_level2d(f);
      const Json input = Json::parse(to_json(f));
      if (p_which == "strong-maximal") {
        std::optional<MeshWeight2D> w;
        if (!p_weight.empty()) w = load_weight2d(p_weight);
        return finish(verify_strong_maximal_comparability(f, delta, w), p_out, input);
      }
      if (p_sets < 1) throw UsageError("--sets must be positive");
      const auto sets = staircases(p_seed, f.first, f.second, p_sets);
      if (p_which == "bmo") return finish(verify_product_bmo(f, delta, sets), p_out, input);
      Json j;
      j["schema"] = kReportSchema;
      j["delta"] = delta.str();
      for (const GridPair& pair : GridPair::all(f.first, f.second, delta)) {
        j[pair.tag()] = {{"h1", product_h1_dyadic_norm(f, pair)},
                         {"bmo_lower_bound", product_bmo_norm(f, pair, sets)},
                         {"duality_K_emp", duality_ratio(p_seed, 8, pair, sets)}};
      }
      write_output(p_out, j.dump(2) + "\n");
      return 0;
    }

    if (*gen_weight || *gen_function) {
      if (gen_2d) {
        const Domain t = Domain::torus(gen_level);
        if (gen_level > kMaxLevel2D) throw UsageError("2D level exceeds the cap " + std::to_string(kMaxLevel2D));
        if (*gen_weight) {
          const MeshWeight2D w = tensor_weight(generate_dyadic_doubling(gen_seed, t, gen_ratio),
                                               generate_dyadic_doubling(gen_seed + 1, t, gen_ratio));
          write_output(gen_out, to_json(w.function()) + "\n");
        } else {
          write_output(gen_out, to_json(generate_finite_product_haar(gen_seed, t, t, gen_terms)) + "\n");
        }
        return 0;
      }
      const Domain dom = make_domain(gen_domain, gen_level, gen_window);
      if (*gen_weight) {
        if (!(gen_ratio > 1.0)) throw UsageError("--ratio must exceed 1");
        write_output(gen_out, to_json(generate_dyadic_doubling(gen_seed, dom, gen_ratio).function()) + "\n");
      } else {
        write_output(gen_out, to_json(generate_finite_haar(gen_seed, dom, gen_terms)) + "\n");
      }
      return 0;
    }

    if (*verify_cmd) {
      if (!v_deltas.empty()) {
        cfg.deltas.clear();
        for (const std::string& s : v_deltas) cfg.deltas.push_back(parse_rational(s));
      }
      cfg.suites = v_suite == "all" ? SuiteConfig::all_suites() : std::vector<std::string>{v_suite};
      cfg.parallel = !v_serial;
      if (cfg.level2d == kMaxLevel2D) std::cerr << "warning: 2D level " << cfg.level2d << " is slow\n";
      const SuiteRun run = run_suite(cfg);
      for (const SuiteOutcome& o : run.suites) {
        std::cout << o.name << ": " << (o.pass ? "PASS" : "FAIL") << '\n';
        if (!o.pass) {
          for (const auto& f : o.report["failures"]) std::cerr << o.name << " failure: " << f.dump() << '\n';
        }
      }
      std::cout << "reports written to " << cfg.output_dir << '\n';
      return run.exit_code;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
