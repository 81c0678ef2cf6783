#include "dyadic/haar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "dyadic/random.hpp"
#include "dyadic/simd.hpp"

namespace dyadic {

namespace {

struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    comp += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

Partition partition_for(const Domain& domain, const GridSpec& grid) {
  if (grid.family == Family::Standard) return Partition::mesh(domain);
  return Partition::refined(domain, *grid.delta);
}

double interval_length(int level) { return std::ldexp(1.0, -level); }

// Energy of f minus its mean over a span, zero when f is constant there.
double span_energy(const std::vector<double>& v, const std::vector<double>& len, const Span& s, double mean) {
  bool constant = true;
  for (std::size_t j = s.start + 1; j < s.end(); ++j) constant = constant && v[j] == v[s.start];
  if (constant) return 0.0;
  return simd::active().sq_dev_sum(v.data() + s.start, len.data() + s.start, mean, s.span);
}

// Carleson sums S(J) = sum over Haar intervals I inside J of (f,h_I)^2 plus
// the tail energy inside J, for every grid interval at levels min..L.
struct CarlesonTable {
  std::vector<std::vector<Span>> spans;  // index n - min
  std::vector<std::vector<double>> sums;
};

CarlesonTable carleson_sums(const HaarCoefficients& h) {
  const int lo = h.min_level;
  const int top = h.partition.domain().finest;
  const std::size_t k = h.partition.size();
  CarlesonTable t;
  t.spans.resize(static_cast<std::size_t>(top - lo + 1));
  t.sums.resize(t.spans.size());
  t.spans.back() = h.cells;
  t.sums.back() = h.cell_tail;
  for (int n = top - 1; n >= lo; --n) {
    const auto idx = static_cast<std::size_t>(n - lo);
    const std::vector<Span>& child_spans = t.spans[idx + 1];
    const std::vector<double>& child_sums = t.sums[idx + 1];
    std::unordered_map<std::size_t, std::size_t> at;
    for (std::size_t c = 0; c < child_spans.size(); ++c) at.emplace(child_spans[c].start % k, c);
    const std::size_t first = h.level_offset[idx];
    const std::size_t last = idx + 1 < h.level_offset.size() ? h.level_offset[idx + 1] : h.terms.size();
    for (std::size_t i = first; i < last; ++i) {
      const HaarTerm& term = h.terms[i];
      const std::size_t half = term.span.span / 2;
      const double c2 = term.coeff * term.coeff;
      const double s = c2 + child_sums[at.at(term.span.start % k)] + child_sums[at.at((term.span.start + half) % k)];
      t.spans[idx].push_back(term.span);
      t.sums[idx].push_back(s);
    }
  }
  return t;
}

double max_abs(const MeshFunction1D& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::fabs(v));
  return m;
}

// Adds coeff * h_I to mesh values; span in mesh cells, wrapping on the torus.
void add_haar(std::vector<double>& values, const Span& s, int level, double coeff) {
  const double amp = coeff / std::sqrt(interval_length(level));
  const std::size_t n = values.size();
  const std::size_t half = s.span / 2;
  for (std::size_t t = 0; t < s.span; ++t) values[(s.start + t) % n] += t < half ? amp : -amp;
}

}  // namespace

const HaarTerm* HaarCoefficients::find(const IntervalId& id) const {
  if (!(id.grid == grid) || id.level < min_level || id.level > max_level) return nullptr;
  const auto idx = static_cast<std::size_t>(id.level - min_level);
  const std::size_t first = level_offset[idx];
  const std::size_t last = idx + 1 < level_offset.size() ? level_offset[idx + 1] : terms.size();
  if (first == last) return nullptr;
  const mpz_class pos = id.index - terms[first].id.index;
  if (pos < 0 || pos >= static_cast<unsigned long>(last - first)) return nullptr;
  return &terms[first + pos.get_ui()];
}

double HaarCoefficients::energy() const {
  Accumulator acc;
  for (const HaarTerm& t : terms) acc.add(t.coeff * t.coeff);
  return acc.value();
}

nlohmann::ordered_json HaarCoefficients::to_json() const {
  nlohmann::ordered_json j;
  j["grid"] = grid.tag();
  if (grid.delta) j["delta"] = grid.delta->str();
  if (mean) j["mean"] = *mean;
  j["tail"] = tail;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const HaarTerm& t : terms) {
    arr.push_back({{"level", t.id.level}, {"index", t.id.index.get_str()}, {"coeff", t.coeff}});
  }
  j["coefficients"] = arr;
  return j;
}

HaarCoefficients haar_transform(const MeshFunction1D& f, const GridSpec& grid) {
  return haar_transform(f, grid, partition_for(f.domain, grid));
}

HaarCoefficients haar_transform(const MeshFunction1D& f, const GridSpec& grid, const Partition& part) {
  if (!(f.domain == grid.domain) || !(f.domain == part.domain())) {
    throw DomainError("function, grid and partition use different domains");
  }
  const Domain& dom = f.domain;
  HaarCoefficients h{grid, part, dom.min_level(), dom.finest - 1, {}, {}, std::nullopt, {}, {}, 0.0};
  const PrefixTable prefix(part, f.values);
  for (int n = h.min_level; n <= h.max_level; ++n) {
    h.level_offset.push_back(h.terms.size());
    const double scale = 1.0 / std::sqrt(interval_length(n));
    for (const IntervalId& id : resident_intervals(grid, n)) {
      const Span s = part.span_of(id);
      const std::size_t mid = s.start + s.span / 2;
      const double c = (prefix.integral(s.start, mid) - prefix.integral(mid, s.end())) * scale;
      h.terms.push_back(HaarTerm{id, s, c});
    }
  }
  if (dom.is_torus()) h.mean = prefix.integral(0, part.size());

  const std::vector<double> v = part.expand(f.values);
  const std::vector<double>& len = part.lengths();
  h.cells = part.grid_spans(grid, dom.finest);
  Accumulator tail;
  for (const Span& s : h.cells) {
    const double e = span_energy(v, len, s, prefix.integral(s) / part.length(s));
    h.cell_tail.push_back(e);
    tail.add(e);
  }
  h.tail = tail.value();
  return h;
}

double l2_norm_squared(const MeshFunction1D& f) {
  Accumulator acc;
  for (double v : f.values) acc.add(v * v);
  return std::ldexp(acc.value(), -f.domain.finest);
}

OscillationTable::OscillationTable(const MeshFunction1D& f, const Partition& part)
    : part_(&part), v_(part.expand(f.values)), prefix_(part, f.values) {
  if (!(f.domain == part.domain())) throw DomainError("function and partition use different domains");
}

double OscillationTable::mean(const Span& s) const { return prefix_.integral(s) / part_->length(s); }

double OscillationTable::oscillation(const Span& s) const {
  const double len = part_->length(s);
  const double m = prefix_.integral(s) / len;
  return simd::active().abs_dev_sum(v_.data() + s.start, part_->lengths().data() + s.start, m, s.span) / len;
}

double OscillationTable::p_oscillation(const Span& s, double p) const {
  if (!(p >= 1.0)) throw DomainError("p-oscillation requires p >= 1");
  if (p == 1.0) return oscillation(s);
  const double len = part_->length(s);
  const double m = prefix_.integral(s) / len;
  const double* w = part_->lengths().data() + s.start;
  if (p == 2.0) return std::sqrt(simd::active().sq_dev_sum(v_.data() + s.start, w, m, s.span) / len);
  Accumulator acc;
  for (std::size_t j = 0; j < s.span; ++j) acc.add(w[j] * std::pow(std::fabs(v_[s.start + j] - m), p));
  return std::pow(acc.value() / len, 1.0 / p);
}

BMOReport OscillationTable::continuous() const {
  BMOReport r;
  r.family = "continuous";
  r.value = -1.0;
  const std::size_t k = part_->size();
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t longest = part_->periodic() ? k : k - a;
    for (std::size_t n = part_->stride(); n <= longest; ++n) {
      const Span s{a, n};
      const double o = oscillation(s);
      if (o > r.value) {
        r.value = o;
        r.argmax = s;
      }
    }
  }
  r.norm_avg = r.value;
  r.argmax_interval = part_->interval(r.argmax);
  return r;
}

BMOReport bmo_dyadic(const MeshFunction1D& f, const GridSpec& grid, BMOMode mode, double p) {
  return bmo_dyadic(f, grid, partition_for(f.domain, grid), mode, p);
}

BMOReport bmo_dyadic(const MeshFunction1D& f, const GridSpec& grid, const Partition& part, BMOMode mode,
                     double p) {
  const OscillationTable table(f, part);
  const HaarCoefficients h = haar_transform(f, grid, part);
  const CarlesonTable c = carleson_sums(h);
  BMOReport r;
  r.family = grid.tag();
  r.mode = mode;
  r.p = p;
  double best = -1.0;
  for (std::size_t li = 0; li < c.spans.size(); ++li) {
    const double len = interval_length(h.min_level + static_cast<int>(li));
    for (std::size_t i = 0; i < c.spans[li].size(); ++i) {
      const Span& s = c.spans[li][i];
      const double avg = table.oscillation(s);
      const double p2 = table.p_oscillation(s, 2.0);
      const double carl = std::sqrt(c.sums[li][i] / len);
      r.norm_avg = std::max(r.norm_avg, avg);
      r.norm_p2 = std::max(r.norm_p2, p2);
      r.norm_carleson = std::max(r.norm_carleson.value_or(0.0), carl);
      double v = avg;
      if (mode == BMOMode::AvgP) v = p == 2.0 ? p2 : table.p_oscillation(s, p);
      if (mode == BMOMode::Carleson) v = carl;
      if (v > best) {
        best = v;
        r.argmax = s;
      }
    }
  }
  r.value = best;
  r.argmax_interval = part.interval(r.argmax);
  return r;
}

BMOReport bmo_continuous(const MeshFunction1D& f) { return bmo_continuous(f, Partition::mesh(f.domain)); }

BMOReport bmo_continuous(const MeshFunction1D& f, const Partition& part) {
  const OscillationTable table(f, part);
  BMOReport r = table.continuous();
  const std::size_t k = part.size();
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t longest = part.periodic() ? k : k - a;
    for (std::size_t n = part.stride(); n <= longest; ++n) r.norm_p2 = std::max(r.norm_p2, table.p_oscillation({a, n}, 2.0));
  }
  return r;
}

VerificationReport bmo_chain_check(const MeshFunction1D& f, const GridSpec& grid, const Partition& part) {
  const OscillationTable table(f, part);
  const HaarCoefficients h = haar_transform(f, grid, part);
  const CarlesonTable c = carleson_sums(h);
  const double scale = max_abs(f);
  VerificationReport rep;
  rep.name = "bmo-chains";
  const std::string tag = grid.tag();
  Check& upper = rep.check(tag + ": carleson(J) <= osc2(J)^2", false);
  Check& lower = rep.check(tag + ": osc(J) <= sqrt(carleson sup)", false);
  upper.abs_floor = kRelTol * scale * scale;
  lower.abs_floor = kRelTol * scale;
  double sup = 0.0;
  for (std::size_t li = 0; li < c.spans.size(); ++li) {
    const double len = interval_length(h.min_level + static_cast<int>(li));
    for (double s : c.sums[li]) sup = std::max(sup, s / len);
  }
  for (std::size_t li = 0; li < c.spans.size(); ++li) {
    const double len = interval_length(h.min_level + static_cast<int>(li));
    for (std::size_t i = 0; i < c.spans[li].size(); ++i) {
      const Span& s = c.spans[li][i];
      const double p2 = table.p_oscillation(s, 2.0);
      auto where = [&] {
        const ArbitraryInterval q = part.interval(s);
        return "J = [" + q.left.str() + ", " + q.right().str() + ")";
      };
      upper.record(c.sums[li][i] / len, p2 * p2, where);
      lower.record(table.oscillation(s), std::sqrt(sup), where);
    }
  }
  rep.constants[tag + ".carleson"] = std::sqrt(sup);
  return rep;
}

VerificationReport parseval_check(const MeshFunction1D& f, const GridSpec& grid) {
  if (!f.domain.is_torus()) throw DomainError("Parseval is checked on the torus");
  const HaarCoefficients h = haar_transform(f, grid);
  Accumulator lhs;
  lhs.add(h.energy());
  lhs.add(*h.mean * *h.mean);
  lhs.add(h.tail);
  const double norm = l2_norm_squared(f);
  VerificationReport rep;
  rep.name = "parseval";
  rep.constants[grid.tag() + ".coefficients"] = lhs.value();
  rep.constants["l2^2"] = norm;
  rep.check("parseval (" + grid.tag() + ")", true).record(std::fabs(lhs.value() - norm), kIdentityTol * norm);
  return rep;
}

VerificationReport verify_bmo_intersection(const MeshFunction1D& f, const ExactRational& delta, double k_cap) {
  const Domain& dom = f.domain;
  const Partition part = Partition::refined(dom, delta);
  const GridSpec std_grid = GridSpec::standard(dom);
  const GridSpec shifted = GridSpec::shifted(delta, dom);
  const OscillationTable table(f, part);
  const BMOReport cont = table.continuous();

  auto grid_norm = [&](const GridSpec& g) {
    double best = 0.0;
    for (const Span& s : grid_family(part, g, dom.min_level(), dom.finest)) best = std::max(best, table.oscillation(s));
    return best;
  };
  const double nd = grid_norm(std_grid);
  const double nt = grid_norm(shifted);
  const double mx = std::max(nd, nt);
  if (mx == 0.0 && cont.value > 0.0) {
    throw std::logic_error("both dyadic BMO norms vanish while the continuous norm does not");
  }

  VerificationReport rep;
  rep.name = "bmo-intersection";
  rep.parameters["delta"] = delta.str();
  rep.parameters["L"] = std::to_string(dom.finest);
  rep.constants["bmo.continuous"] = cont.value;
  rep.constants["bmo.std"] = nd;
  rep.constants["bmo.delta"] = nt;
  const double k_emp = mx > 0.0 ? cont.value / mx : 1.0;
  rep.constants["K_emp"] = k_emp;
  rep.constants["K_cap"] = k_cap;
  rep.check("std <= continuous", true).record(nd, cont.value);
  rep.check("delta <= continuous", true).record(nt, cont.value);
  rep.check("continuous / max(std, delta) <= K_cap (monitored)", false).record(k_emp, k_cap);
  rep.merge(bmo_chain_check(f, std_grid, part));
  rep.merge(bmo_chain_check(f, shifted, part));
  return rep;
}

MeshFunction1D project(const MeshFunction1D& f, const IntervalId& j) {
  const Domain& dom = f.domain;
  if (j.grid.family != Family::Standard || !(j.grid.domain == dom)) {
    throw DomainError("projection needs a standard interval of the function's domain");
  }
  if (j.level > dom.finest || j.level < dom.min_level()) throw DomainError("interval level is not resolvable on the mesh");
  const Partition part = Partition::mesh(dom);
  const Span target = part.span_of(j);
  std::vector<double> out(dom.cells(), 0.0);
  if (j.level == dom.finest) return MeshFunction1D{dom, out};
  const HaarCoefficients h = haar_transform(f, j.grid, part);
  const std::size_t n = dom.cells();
  for (const HaarTerm& t : h.terms) {
    if (t.id.level < j.level) continue;
    const std::size_t offset = (t.span.start + n - target.start % n) % n;
    if (offset + t.span.span > target.span) continue;
    add_haar(out, t.span, t.id.level, t.coeff);
  }
  return MeshFunction1D{dom, out};
}

MeshFunction1D vmo_truncation(const MeshFunction1D& f, int n) {
  if (n < 0) throw DomainError("truncation threshold must be >= 0");
  const Domain& dom = f.domain;
  const GridSpec grid = GridSpec::standard(dom);
  const Partition part = Partition::mesh(dom);
  const HaarCoefficients h = haar_transform(f, grid, part);
  std::vector<double> out(dom.cells(), 0.0);
  if (dom.is_torus()) {
    std::fill(out.begin(), out.end(), *h.mean);
  } else {
    const PrefixTable prefix(part, f.values);
    for (const Span& s : part.grid_spans(grid, dom.min_level())) {
      const double m = prefix.integral(s) / part.length(s);
      for (std::size_t t = s.start; t < s.end(); ++t) out[t] = m;
    }
  }
  const ExactRational radius = ExactRational::dyadic(1, -n);
  for (const HaarTerm& t : h.terms) {
    if (t.id.level < -n || t.id.level > n) continue;
    if (!dom.is_torus()) {
      const Interval iv = interval(t.id);
      if (iv.left < -radius || iv.right() > radius) continue;
    }
    add_haar(out, t.span, t.id.level, t.coeff);
  }
  return MeshFunction1D{dom, out};
}

MeshFunction1D haar_function(const IntervalId& id) {
  const Domain& dom = id.grid.domain;
  if (id.grid.family != Family::Standard) throw DomainError("mesh Haar functions exist for the standard grid");
  if (id.level >= dom.finest || id.level < dom.min_level()) throw DomainError("Haar level not resolvable on the mesh");
  const Partition part = Partition::mesh(dom);
  std::vector<double> out(dom.cells(), 0.0);
  add_haar(out, part.span_of(id), id.level, 1.0);
  return MeshFunction1D{dom, out};
}

VerificationReport verify_truncation(const MeshFunction1D& f) {
  const Domain& dom = f.domain;
  const GridSpec grid = GridSpec::standard(dom);
  const int last = std::max(dom.is_torus() ? 0 : dom.coarsest, dom.finest);
  double sup = 0.0;
  for (double v : f.values) sup = std::max(sup, std::fabs(v));
  const double scale = sup * sup;
  VerificationReport rep;
  rep.name = "vmo-truncation";
  rep.parameters["domain"] = dom.is_torus() ? "torus" : "line";
  rep.parameters["N"] = std::to_string(last);
  Check& mono = rep.check("carleson(f - f_n+1) <= carleson(f - f_n)", false);
  mono.abs_floor = kIdentityTol * scale;
  double previous = 0.0;
  for (int n = 0; n <= last; ++n) {
    const MeshFunction1D fn = vmo_truncation(f, n);
    std::vector<double> rest(f.size());
    for (std::size_t i = 0; i < rest.size(); ++i) rest[i] = f.values[i] - fn.values[i];
    const double norm = bmo_dyadic(MeshFunction1D{dom, rest}, grid, BMOMode::Carleson).value;
    rep.constants["carleson(f - f_" + std::to_string(n) + ")"] = norm;
    if (n > 0) mono.record(norm, previous, [&] { return "n = " + std::to_string(n); });
    previous = norm;
  }
  Check& zero = rep.check("carleson(f - f_N) = 0", false);
  zero.abs_floor = kIdentityTol * scale;
  zero.record(previous, 0.0);
  return rep;
}

MeshFunction1D generate_finite_haar(std::uint64_t seed, const Domain& domain, int terms) {
  if (terms < 0) throw DomainError("number of Haar terms must be >= 0");
  Rng rng(seed);
  const GridSpec grid = GridSpec::standard(domain);
  const Partition part = Partition::mesh(domain);
  std::vector<double> out(domain.cells(), domain.is_torus() ? rng.uniform(-1.0, 1.0) : 0.0);
  for (int t = 0; t < terms; ++t) {
    const int level = static_cast<int>(rng.integer(domain.min_level(), domain.finest - 1));
    const std::vector<IntervalId> ids = resident_intervals(grid, level);
    const IntervalId& id = ids[static_cast<std::size_t>(rng.integer(0, static_cast<long>(ids.size()) - 1))];
    add_haar(out, part.span_of(id), level, rng.uniform(-1.0, 1.0));
  }
  return MeshFunction1D::make(domain, std::move(out));
}

}  // namespace dyadic
