#include "dyadic/maximal_hardy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dyadic/random.hpp"
#include "dyadic/simd.hpp"
#include "dyadic/weights.hpp"

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

// Running integrals of |f| (or |f| w) and of the measure (length or w).
struct AverageTables {
  PrefixTable num;
  std::vector<double> den;

  AverageTables(const MeshFunction1D& f, const Partition& part, const MeshWeight1D* w) {
    std::vector<double> a(f.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::fabs(f.values[i]) * (w ? w->values[i] : 1.0);
    num = PrefixTable(part, a);
    den = w ? PrefixTable(part, w->values).data() : part.coords();
  }

  double average(const Span& s) const {
    return (num.data()[s.end()] - num.data()[s.start]) / (den[s.end()] - den[s.start]);
  }
};

std::vector<double> fold(const Partition& part, std::vector<double> acc) {
  const std::size_t k = part.size();
  if (part.periodic()) {
    for (std::size_t t = 0; t < k; ++t) acc[t] = std::max(acc[t], acc[t + k]);
  }
  acc.resize(k);
  return acc;
}

std::string point_name(const Partition& part, std::size_t j) { return "x = " + part.point(j).str(); }

}  // namespace

std::vector<double> maximal_on(const MeshFunction1D& f, const Partition& part, const MaximalFamily& family,
                               const MeshWeight1D* w) {
  if (!(f.domain == part.domain())) throw DomainError("function and partition use different domains");
  if (w && !(w->domain == f.domain)) throw DomainError("function and weight use different domains");
  const AverageTables t(f, part, w);
  const simd::Kernels& kern = simd::active();
  const std::size_t k = part.size();
  std::vector<double> acc(part.limit(), 0.0);

  if (family.grid) {
    const Domain& dom = f.domain;
    for (const Span& s : grid_family(part, *family.grid, dom.min_level(), dom.finest)) {
      kern.max_broadcast(acc.data() + s.start, t.average(s), s.span);
    }
    return fold(part, std::move(acc));
  }

  const double* num = t.num.data().data();
  const double* den = t.den.data();
  std::vector<double> row(k);
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t count = part.periodic() ? k : k - a;
    // row[j]: average over [a, a + 1 + j); then the best over spans reaching past a + j.
    kern.ratio_row(num + a + 1, den + a + 1, num[a], den[a], row.data(), count);
    for (std::size_t j = count - 1; j-- > 0;) row[j] = std::max(row[j], row[j + 1]);
    kern.max_into(acc.data() + a, row.data(), count);
  }
  return fold(part, std::move(acc));
}

MeshFunction1D hl_maximal(const MeshFunction1D& f, const MaximalFamily& family, const std::optional<MeshWeight1D>& w) {
  const Partition part = (family.grid && family.grid->family != Family::Standard)
                             ? Partition::refined(f.domain, *family.grid->delta)
                             : Partition::mesh(f.domain);
  const std::vector<double> sub = maximal_on(f, part, family, w ? &*w : nullptr);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sub[i * part.stride()];
  return MeshFunction1D{f.domain, out};
}

VerificationReport verify_maximal_comparability(const MeshFunction1D& f, const ExactRational& delta,
                                                const std::optional<MeshWeight1D>& w) {
  const Domain& dom = f.domain;
  const Shift shift = Shift::make(delta);
  const Partition part = Partition::refined(dom, delta);
  const MeshWeight1D* wp = w ? &*w : nullptr;
  const std::vector<double> m = maximal_on(f, part, MaximalFamily::continuous(), wp);
  const std::vector<double> md = maximal_on(f, part, MaximalFamily::of(GridSpec::standard(dom)), wp);
  const std::vector<double> mt = maximal_on(f, part, MaximalFamily::of(GridSpec::shifted(delta, dom)), wp);
  const double big_c = shift.covering_value();

  VerificationReport rep;
  rep.name = w ? "weighted-maximal-comparability" : "maximal-comparability";
  rep.parameters["delta"] = delta.str();
  rep.parameters["L"] = std::to_string(dom.finest);
  rep.constants["C(delta)"] = big_c;
  double factor = big_c;
  if (w) {
    if (!dom.is_torus()) throw DomainError("weighted maximal verification runs on the torus");
    const double cdy = grid_doubling_constant(*w, shift);
    factor = big_c * std::pow(cdy, std::log2(4.0 * big_c));
    rep.constants["C_dy"] = cdy;
  }
  rep.constants["factor"] = factor;

  Check& forward = rep.check("M_d + M_delta <= 2 M", true);
  Check& reverse = rep.check(w ? "M <= C C_dy^log2(4C) (M_d + M_delta)" : "M <= C max(M_d, M_delta)", false);
  for (std::size_t j = 0; j < m.size(); ++j) {
    forward.record(md[j] + mt[j], 2.0 * m[j], [&] { return point_name(part, j); });
    const double grid = w ? md[j] + mt[j] : std::max(md[j], mt[j]);
    reverse.record(m[j], factor * grid, [&] { return point_name(part, j); });
  }
  return rep;
}

MeshFunction1D Atom::function() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values[i] / divisor;
  return MeshFunction1D{support.domain, out};
}

AtomValidation validate_atom(const Atom& a, const MeshWeight1D& w) {
  const Domain& dom = w.domain;
  if (!(a.support.domain == dom) || a.values.size() != dom.cells()) {
    throw DomainError("atom and weight use different domains");
  }
  AtomValidation v;
  v.support = true;
  for (std::size_t i = 0; i < a.values.size() && v.support; ++i) {
    if (a.values[i] == 0.0) continue;
    const ExactRational left = dom.left() + ExactRational::dyadic(static_cast<long>(i), dom.finest);
    if (!contains(dom, dom.reduce(a.support.left), a.support.length, left, dom.cell_length())) {
      v.support = false;
      v.reason = "nonzero value at cell " + std::to_string(i) + " outside the support";
    }
  }
  const double h = std::ldexp(1.0, -dom.finest);
  Accumulator sq;
  Accumulator mom;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double x = a.values[i] / a.divisor;
    sq.add(x * x * w.values[i] * h);
    mom.add(x * w.values[i] * h);
  }
  const double wq = weight_integral(w, a.support);
  v.l2 = std::sqrt(sq.value());
  v.l2_bound = 1.0 / std::sqrt(wq);
  v.size = within(v.l2, v.l2_bound, false);
  v.moment = mom.value();
  v.moment_bound = kIdentityTol * v.l2 * std::sqrt(wq);
  v.cancellation = std::fabs(v.moment) <= v.moment_bound;
  if (v.reason.empty() && !v.size) v.reason = "L2(w) norm above w(Q)^-1/2";
  if (v.reason.empty() && !v.cancellation) v.reason = "weighted moment does not vanish";
  return v;
}

RescaledAtom atom_rescale(const Atom& a, const MeshWeight1D& w, const ExactRational& delta) {
  const Shift shift = Shift::make(delta);
  return atom_rescale(a, w, shift, grid_doubling_constant(w, shift));
}

RescaledAtom atom_rescale(const Atom& a, const MeshWeight1D& w, const Shift& shift, double doubling_constant) {
  const AtomValidation in = validate_atom(a, w);
  if (!in.pass()) throw DomainError("invalid atom: " + in.reason);
  const double big_c = shift.covering_value();
  RescaledAtom r;
  r.cover = cover(a.support, shift).id;
  r.doubling_constant = doubling_constant;
  r.c0 = std::sqrt(big_c) * std::pow(doubling_constant, 0.5 * std::log2(4.0 * big_c));
  const Interval iv = interval(r.cover);
  r.atom = Atom{ArbitraryInterval{iv.left, iv.length.to_rational(), w.domain}, a.values, a.divisor * r.c0};
  r.validation = validate_atom(r.atom, w);
  return r;
}

double AtomicDecomposition::norm() const {
  Accumulator acc;
  for (const Entry& e : entries) acc.add(std::fabs(e.coefficient()));
  return acc.value();
}

MeshFunction1D AtomicDecomposition::reconstruct(const Domain& domain) const {
  std::vector<double> out(domain.cells(), 0.0);
  for (const Entry& e : entries) {
    if (e.atom.values.size() != out.size()) throw DomainError("atom does not match the domain");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += e.base * e.atom.values[i];
  }
  return MeshFunction1D{domain, out};
}

SplitDecomposition decompose_h1(const AtomicDecomposition& d, const MeshWeight1D& w, const ExactRational& delta) {
  const Shift shift = Shift::make(delta);
  const double cdy = grid_doubling_constant(w, shift);
  SplitDecomposition out;
  const double big_c = shift.covering_value();
  out.c0 = std::sqrt(big_c) * std::pow(cdy, 0.5 * std::log2(4.0 * big_c));
  for (const AtomicDecomposition::Entry& e : d.entries) {
    RescaledAtom r = atom_rescale(e.atom, w, shift, cdy);
    out.validations.push_back(r.validation);
    out.to_standard.push_back(r.cover.grid.family == Family::Standard);
    AtomicDecomposition& target = out.to_standard.back() ? out.standard : out.shifted;
    target.entries.push_back(AtomicDecomposition::Entry{e.base, std::move(r.atom)});
  }
  return out;
}

VerificationReport verify_decomposition(const AtomicDecomposition& d, const MeshWeight1D& w,
                                        const ExactRational& delta) {
  const SplitDecomposition s = decompose_h1(d, w, delta);
  VerificationReport rep;
  rep.name = "h1-decomposition";
  rep.parameters["delta"] = delta.str();
  rep.constants["C0"] = s.c0;
  rep.constants["atoms.std"] = static_cast<double>(s.standard.entries.size());
  rep.constants["atoms.delta"] = static_cast<double>(s.shifted.entries.size());

  Check& valid = rep.check("rescaled atoms are grid atoms", true);
  for (std::size_t i = 0; i < s.validations.size(); ++i) {
    valid.record(s.validations[i].pass() ? 0.0 : 1.0, 0.0,
                 [&] { return "entry " + std::to_string(i) + ": " + s.validations[i].reason; });
  }
  // Both halves together, replayed in input order, give back the input sum.
  const Domain& dom = w.domain;
  const MeshFunction1D before = d.reconstruct(dom);
  std::vector<double> after(dom.cells(), 0.0);
  std::size_t is = 0;
  std::size_t it = 0;
  for (std::size_t i = 0; i < d.entries.size(); ++i) {
    const AtomicDecomposition::Entry& e = s.to_standard[i] ? s.standard.entries[is++] : s.shifted.entries[it++];
    for (std::size_t c = 0; c < after.size(); ++c) after[c] += e.base * e.atom.values[c];
  }
  std::size_t mismatched = 0;
  for (std::size_t c = 0; c < after.size(); ++c) mismatched += after[c] != before.values[c];
  rep.check("reconstruction is bit-identical", true).record(static_cast<double>(mismatched), 0.0);
  rep.check("norm(std) + norm(delta) <= C0 norm", false)
      .record(s.standard.norm() + s.shifted.norm(), s.c0 * d.norm());
  return rep;
}

Atom make_atom(const ArbitraryInterval& support, const MeshWeight1D& w, const std::vector<double>& raw,
               double size_fraction) {
  const Domain& dom = w.domain;
  if (raw.size() != dom.cells()) throw DomainError("raw atom values have the wrong size");
  std::vector<double> v(dom.cells(), 0.0);
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const ExactRational left = dom.left() + ExactRational::dyadic(static_cast<long>(i), dom.finest);
    if (contains(dom, dom.reduce(support.left), support.length, left, dom.cell_length())) inside.push_back(i);
  }
  // Remove the weighted mean twice; the second pass takes out the rounding left by the first.
  for (std::size_t i : inside) v[i] = raw[i];
  for (int pass = 0; pass < 2; ++pass) {
    Accumulator num;
    Accumulator den;
    for (std::size_t i : inside) {
      num.add(v[i] * w.values[i]);
      den.add(w.values[i]);
    }
    const double m = inside.empty() ? 0.0 : num.value() / den.value();
    for (std::size_t i : inside) v[i] -= m;
  }
  Accumulator sq;
  for (std::size_t i : inside) sq.add(v[i] * v[i] * w.values[i]);
  const double l2 = std::sqrt(std::ldexp(sq.value(), -dom.finest));
  if (l2 > 0.0) {
    const double target = size_fraction / std::sqrt(weight_integral(w, support));
    for (double& x : v) x *= target / l2;
  }
  return Atom{support, v, 1.0};
}

Atom generate_atom(std::uint64_t seed, const MeshWeight1D& w) {
  const Domain& dom = w.domain;
  if (!dom.is_torus()) throw DomainError("atoms are generated on the torus");
  Rng rng(seed);
  const auto n = static_cast<long>(dom.cells());
  const long first = rng.integer(0, n - 1);
  const long count = rng.integer(2, n);
  const ArbitraryInterval q{ExactRational::dyadic(first, dom.finest), ExactRational::dyadic(count, dom.finest), dom};
  std::vector<double> raw(dom.cells());
  for (double& x : raw) x = rng.uniform(-1.0, 1.0);
  return make_atom(q, w, raw, rng.uniform(0.5, 1.0));
}

}  // namespace dyadic
