#include "dyadic/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dyadic/random.hpp"
#include "dyadic/simd.hpp"

namespace dyadic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_p(double p) {
  std::ostringstream os;
  os << p;
  return os.str();
}

}  // namespace

WeightClass WeightClass::ap(double p) {
  if (!(p >= 1.0)) throw DomainError("A_p requires p >= 1");
  return WeightClass{Kind::Ap, p};
}

WeightClass WeightClass::rh(double p) {
  if (!(p >= 1.0)) throw DomainError("RH_p requires p >= 1");
  return WeightClass{Kind::RHp, p};
}

WeightClass WeightClass::parse(const std::string& tag) {
  if (tag == "doubling") return doubling();
  auto exponent = [&](const std::string& s) {
    if (s == "inf") return kInf;
    try {
      std::size_t used = 0;
      const double p = std::stod(s, &used);
      if (used != s.size()) throw DomainError("bad exponent in class tag: " + tag);
      return p;
    } catch (const std::logic_error&) {
      throw DomainError("bad class tag: " + tag);
    }
  };
  if (tag.rfind("rh", 0) == 0) return rh(exponent(tag.substr(2)));
  if (tag.rfind("a", 0) == 0) return ap(exponent(tag.substr(1)));
  throw DomainError("unknown weight class: " + tag);
}

std::string WeightClass::tag() const {
  switch (kind) {
    case Kind::Doubling:
      return "doubling";
    case Kind::Ap:
      return "a" + (infinite() ? std::string("inf") : format_p(p));
    case Kind::RHp:
      return "rh" + (infinite() ? std::string("inf") : format_p(p));
  }
  return "";
}

// Evaluation of one class functional from the mean of w, the mean of an
// auxiliary density, and the min/max of w over the span. Continuous and grid
// scans both go through combine(), so grid values are bitwise members of the
// continuous set.
struct WeightScanner::Tables {
  enum class Form { ApFinite, A1, AInf, RHFinite, RH1, RHInf };
  Form form = Form::ApFinite;
  double p = 2.0;
  PrefixTable aux;
  bool needs_aux = true;
  bool needs_min = false;
  bool needs_max = false;

  double combine(double mw, double ma, double mn, double mx) const {
    switch (form) {
      case Form::ApFinite:
        return mw * std::pow(ma, p - 1.0);
      case Form::A1:
        return mw / mn;
      case Form::AInf:
        return mw * std::exp(-ma);
      case Form::RHFinite:
        return std::pow(ma, 1.0 / p) / mw;
      case Form::RH1:
        return ma / mw - std::log(mw);
      case Form::RHInf:
        return mx / mw;
    }
    return 0.0;
  }
};

WeightScanner::WeightScanner(const MeshWeight1D& w, const Partition& part)
    : w_(&w), part_(&part), mass_(part, w.values) {
  if (!(w.domain == part.domain())) throw DomainError("weight and partition use different domains");
}

WeightScanner::Tables WeightScanner::tables(const WeightClass& c) const {
  Tables t;
  const std::vector<double>& v = w_->values;
  std::vector<double> aux(v.size());
  if (c.kind == WeightClass::Kind::Doubling) throw DomainError("doubling has no interval functional");
  if (c.kind == WeightClass::Kind::Ap) {
    if (c.infinite()) {
      t.form = Tables::Form::AInf;
      for (std::size_t i = 0; i < v.size(); ++i) aux[i] = std::log(v[i]);
    } else if (c.p == 1.0) {
      t.form = Tables::Form::A1;
      t.needs_aux = false;
      t.needs_min = true;
    } else {
      t.form = Tables::Form::ApFinite;
      t.p = c.p;
      const double e = -1.0 / (c.p - 1.0);
      for (std::size_t i = 0; i < v.size(); ++i) aux[i] = std::pow(v[i], e);
    }
  } else {
    if (c.infinite()) {
      t.form = Tables::Form::RHInf;
      t.needs_aux = false;
      t.needs_max = true;
    } else if (c.p == 1.0) {
      t.form = Tables::Form::RH1;
      for (std::size_t i = 0; i < v.size(); ++i) aux[i] = v[i] * std::log(v[i]);
    } else {
      t.form = Tables::Form::RHFinite;
      t.p = c.p;
      for (std::size_t i = 0; i < v.size(); ++i) aux[i] = std::pow(v[i], c.p);
    }
  }
  if (t.needs_aux) t.aux = PrefixTable(*part_, aux);
  return t;
}

double WeightScanner::value(const WeightClass& c, const Span& s) const {
  const Tables t = tables(c);
  const std::vector<double>& x = part_->coords();
  const double len = x[s.end()] - x[s.start];
  const double mw = (mass_.data()[s.end()] - mass_.data()[s.start]) / len;
  const double ma = t.needs_aux ? (t.aux.data()[s.end()] - t.aux.data()[s.start]) / len : 0.0;
  double mn = kInf;
  double mx = -kInf;
  for (std::size_t j = s.start; j < s.end(); ++j) {
    mn = std::min(mn, w_->values[part_->cell(j)]);
    mx = std::max(mx, w_->values[part_->cell(j)]);
  }
  return t.combine(mw, ma, mn, mx);
}

ConstantReport WeightScanner::over(const WeightClass& c, const std::vector<Span>& spans,
                                   const std::string& family) const {
  ConstantReport r;
  r.cls = c;
  r.family = family;
  r.value = -kInf;
  const Tables t = tables(c);
  const std::vector<double>& x = part_->coords();
  const std::vector<double>& pw = mass_.data();
  for (const Span& s : spans) {
    const double len = x[s.end()] - x[s.start];
    const double mw = (pw[s.end()] - pw[s.start]) / len;
    const double ma = t.needs_aux ? (t.aux.data()[s.end()] - t.aux.data()[s.start]) / len : 0.0;
    double mn = kInf;
    double mx = -kInf;
    if (t.needs_min || t.needs_max) {
      for (std::size_t j = s.start; j < s.end(); ++j) {
        const double wv = w_->values[part_->cell(j)];
        mn = wv < mn ? wv : mn;
        mx = wv > mx ? wv : mx;
      }
    }
    const double val = t.combine(mw, ma, mn, mx);
    if (val > r.value) {
      r.value = val;
      r.argmax = s;
    }
  }
  r.supremum = r.value;
  if (!spans.empty()) r.argmax_interval = part_->interval(r.argmax);
  return r;
}

ConstantReport WeightScanner::continuous(const WeightClass& c) const {
  if (c.kind == WeightClass::Kind::Doubling) return continuous_doubling();
  ConstantReport r;
  r.cls = c;
  r.family = "continuous";
  r.value = -kInf;
  const Tables t = tables(c);
  const simd::Kernels& k = simd::active();
  const std::vector<double>& x = part_->coords();
  const std::vector<double>& pw = mass_.data();
  const std::size_t n = part_->size();
  const std::size_t stride = part_->stride();
  std::vector<double> mw(n + 1);
  std::vector<double> ma(n + 1);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t end = part_->periodic() ? a + n : n;
    const std::size_t count = end - a;
    // mw[j] is the mean over [a, a + 1 + j).
    k.ratio_row(pw.data() + a + 1, x.data() + a + 1, pw[a], x[a], mw.data(), count);
    if (t.needs_aux) k.ratio_row(t.aux.data().data() + a + 1, x.data() + a + 1, t.aux.data()[a], x[a], ma.data(), count);
    double mn = kInf;
    double mx = -kInf;
    for (std::size_t j = 0; j < count; ++j) {
      const double wv = w_->values[part_->cell(a + j)];
      mn = wv < mn ? wv : mn;
      mx = wv > mx ? wv : mx;
      if (j + 1 < stride) continue;
      const double val = t.combine(mw[j], t.needs_aux ? ma[j] : 0.0, mn, mx);
      if (val > r.value) {
        r.value = val;
        r.argmax = Span{a, j + 1};
      }
    }
  }
  r.supremum = r.value;
  r.argmax_interval = part_->interval(r.argmax);
  return r;
}

// sup over arcs Q with |Q| <= 1/2 of w(Q~)/w(Q), Q~ the concentric double.
ConstantReport WeightScanner::continuous_doubling() const {
  if (!part_->periodic()) throw DomainError("continuous doubling is implemented on the torus");
  const Domain& dom = w_->domain;
  const std::size_t cells = dom.cells();
  const double h = std::ldexp(1.0, -dom.finest);
  // Mesh prefix over three turns; coordinates are shifted by one turn.
  std::vector<double> p3(3 * cells + 1, 0.0);
  {
    double s = 0.0;
    double comp = 0.0;
    for (std::size_t i = 0; i < 3 * cells; ++i) {
      const double term = w_->values[i % cells] * h;
      const double t = s + term;
      comp += std::fabs(s) >= std::fabs(term) ? (s - t) + term : (term - t) + s;
      s = t;
      p3[i + 1] = s + comp;
    }
  }
  auto mass_to = [&](double y) {
    const double u = y / h;
    auto i = static_cast<std::size_t>(std::floor(u));
    if (i >= 3 * cells) i = 3 * cells - 1;
    return p3[i] + (u - static_cast<double>(i)) * h * w_->values[i % cells];
  };
  ConstantReport r;
  r.cls = WeightClass::doubling();
  r.family = "continuous";
  r.value = -kInf;
  const std::vector<double>& x = part_->coords();
  const std::vector<double>& pw = mass_.data();
  const std::size_t n = part_->size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + part_->stride(); b <= a + n; ++b) {
      const double len = x[b] - x[a];
      if (len > 0.5) break;
      const double inner = pw[b] - pw[a];
      const double outer = mass_to(x[b] + 1.0 + len / 2) - mass_to(x[a] + 1.0 - len / 2);
      const double val = outer / inner;
      if (val > r.value) {
        r.value = val;
        r.argmax = Span{a, b - a};
      }
    }
  }
  r.supremum = r.value;
  r.argmax_interval = part_->interval(r.argmax);
  return r;
}

double dyadic_doubling(const MeshWeight1D& w, const GridSpec& grid, int depth, int min_child_level) {
  const Domain& dom = w.domain;
  if (!dom.is_torus()) throw DomainError("dyadic doubling scans are implemented on the torus");
  if (depth < 1 || depth > 30) throw DomainError("doubling depth out of range");
  const std::size_t cells = dom.cells();
  const double h = std::ldexp(1.0, -dom.finest);
  std::vector<double> pm(2 * cells + 1, 0.0);
  for (std::size_t i = 0; i < 2 * cells; ++i) pm[i + 1] = pm[i] + w.values[i % cells] * h;

  // Start of piece 0 in cell units: m + theta.
  double origin = 0.0;
  if (grid.family != Family::Standard) {
    origin = grid.delta->mul_pow2(dom.finest).frac().to_double() +
             static_cast<double>(grid.delta->mul_pow2(dom.finest).floor().get_si() % static_cast<long>(cells));
    if (origin < 0) origin += static_cast<double>(cells);
  }
  const std::size_t pieces = std::size_t{1} << depth;
  const double r = std::ldexp(static_cast<double>(cells), -depth);
  auto piece_mass = [&](double s, double e) {
    const auto i0 = static_cast<std::size_t>(std::floor(s));
    const auto i1 = static_cast<std::size_t>(std::floor(e));
    if (i0 == i1) return w.values[i0 % cells] * (e - s) * h;
    double m = w.values[i0 % cells] * (static_cast<double>(i0 + 1) - s) * h;
    m += pm[i1] - pm[i0 + 1];
    if (e > static_cast<double>(i1)) m += w.values[i1 % cells] * (e - static_cast<double>(i1)) * h;
    return m;
  };
  std::vector<double> level(pieces);
  for (std::size_t k = 0; k < pieces; ++k) {
    const double s = origin + static_cast<double>(k) * r;
    level[k] = piece_mass(s, s + r);
  }
  double best = 1.0;
  for (int n = depth; n >= 1; --n) {
    std::vector<double> up(level.size() / 2);
    for (std::size_t k = 0; k < up.size(); ++k) {
      up[k] = level[2 * k] + level[2 * k + 1];
      if (n >= min_child_level) best = std::max({best, up[k] / level[2 * k], up[k] / level[2 * k + 1]});
    }
    level = std::move(up);
  }
  return best;
}

int comparable_depth(const Domain& domain, const Shift& shift) {
  return domain.finest + static_cast<int>(std::ceil(std::log2(shift.covering_value()))) + 3;
}

double grid_doubling_constant(const MeshWeight1D& w, const Shift& shift) {
  const int depth = comparable_depth(w.domain, shift);
  return std::max(dyadic_doubling(w, GridSpec::standard(w.domain), depth),
                  dyadic_doubling(w, GridSpec::shifted(shift.delta, w.domain), depth));
}

IntersectionVerifier::IntersectionVerifier(const Domain& domain, const ExactRational& delta)
    : domain_(domain),
      shift_(Shift::make(delta)),
      part_(Partition::refined(domain, delta)),
      std_(GridSpec::standard(domain)),
      shifted_(GridSpec::shifted(delta, domain)) {
  if (!domain.is_torus()) throw DomainError("weight verification runs on the torus");
  std_spans_ = grid_family(part_, std_, 0, domain.finest);
  shifted_spans_ = grid_family(part_, shifted_, 0, domain.finest);
  depth_ = comparable_depth(domain, shift_);
}

VerificationReport IntersectionVerifier::verify(const MeshWeight1D& w, const WeightClass& c) const {
  return verify(w, std::vector<WeightClass>{c});
}

VerificationReport IntersectionVerifier::verify(const MeshWeight1D& w, const std::vector<WeightClass>& classes) const {
  VerificationReport rep;
  rep.name = "weight-intersection";
  rep.parameters["delta"] = shift_.delta.str();
  rep.parameters["L"] = std::to_string(domain_.finest);
  const WeightScanner scan(w, part_);
  const double big_c = shift_.covering_value();
  const int lv = domain_.finest;

  const double cdy_std = dyadic_doubling(w, std_, lv);
  const double cdy_sh = dyadic_doubling(w, shifted_, lv);
  const double cdy = std::max(dyadic_doubling(w, std_, depth_), dyadic_doubling(w, shifted_, depth_));
  rep.constants["C_dy.std"] = cdy_std;
  rep.constants["C_dy.delta"] = cdy_sh;
  rep.constants["C_dy.extended"] = cdy;
  const double dbl_factor = std::pow(cdy, std::log2(4.0 * big_c));

  auto grid_max = [&](const WeightClass& c) {
    return std::max(scan.over(c, std_spans_, "std").value, scan.over(c, shifted_spans_, "delta").value);
  };
  auto ainf_bound = [&]() {
    double b = kInf;
    for (double p : {1.0, 2.0, 4.0}) b = std::min(b, std::pow(big_c, p) * grid_max(WeightClass::ap(p)));
    return b;
  };

  for (const WeightClass& c : classes) {
    const std::string tag = c.tag();
    if (c.kind == WeightClass::Kind::Doubling) {
      const ConstantReport cont = scan.continuous(c);
      const double bound = std::pow(cdy, std::log2(8.0 * big_c));
      rep.constants[tag + ".continuous"] = cont.value;
      rep.constants[tag + ".std"] = cdy_std;
      rep.constants[tag + ".delta"] = cdy_sh;
      rep.constants[tag + ".bound"] = bound;
      rep.check(tag + ": continuous <= C_dy^log2(8C)", false).record(cont.value, bound);
      if (lv >= 3) {
        // A parent lies inside the double of the child's double.
        const double inner = std::max(dyadic_doubling(w, std_, lv - 1, 2), dyadic_doubling(w, shifted_, lv - 1, 2));
        rep.check(tag + ": dyadic (levels 2..L-1) <= continuous^2", false).record(inner, cont.value * cont.value);
      }
      continue;
    }
    const ConstantReport cont = scan.continuous(c);
    const ConstantReport s = scan.over(c, std_spans_, "std");
    const ConstantReport t = scan.over(c, shifted_spans_, "delta");
    rep.check(tag + ": std <= continuous", true).record(s.supremum, cont.value);
    rep.check(tag + ": delta <= continuous", true).record(t.supremum, cont.value);
    double bound = 0.0;
    double s_const = s.value;
    double t_const = t.value;
    if (c.kind == WeightClass::Kind::Ap) {
      if (c.infinite()) {
        bound = ainf_bound();
      } else {
        bound = std::pow(big_c, c.p) * std::max(s.value, t.value);
      }
    } else {
      s_const = std::max(s.value, cdy_std);
      t_const = std::max(t.value, cdy_sh);
      if (c.infinite()) {
        bound = dbl_factor * std::max(s_const, t_const);
      } else if (c.p == 1.0) {
        bound = std::exp(1.0) * ainf_bound();
      } else {
        bound = std::pow(big_c, 1.0 / c.p) * dbl_factor * std::max(s_const, t_const);
      }
    }
    rep.constants[tag + ".continuous"] = cont.value;
    rep.constants[tag + ".std"] = s_const;
    rep.constants[tag + ".delta"] = t_const;
    rep.constants[tag + ".bound"] = bound;
    rep.check(tag + ": continuous <= bound", false).record(cont.value, bound);
  }
  return rep;
}

ConstantReport class_constant(const MeshWeight1D& w, const WeightClass& c, const std::optional<GridSpec>& grid) {
  if (!grid) {
    const Partition part = Partition::mesh(w.domain);
    const WeightScanner scan(w, part);
    ConstantReport r = scan.continuous(c);
    return r;
  }
  const Partition part =
      grid->family == Family::Standard ? Partition::mesh(w.domain) : Partition::refined(w.domain, *grid->delta);
  const std::string fam = grid->tag();
  if (c.kind == WeightClass::Kind::Doubling) {
    ConstantReport r;
    r.cls = c;
    r.family = fam;
    r.value = r.supremum = dyadic_doubling(w, *grid, w.domain.finest);
    return r;
  }
  const WeightScanner scan(w, part);
  const int lo = w.domain.min_level();
  ConstantReport r = scan.over(c, grid_family(part, *grid, lo, w.domain.finest), fam);
  if (c.kind == WeightClass::Kind::RHp) {
    r.dyadic_doubling = dyadic_doubling(w, *grid, w.domain.finest);
    r.value = std::max(r.supremum, r.dyadic_doubling);
  }
  return r;
}

VerificationReport verify_intersection(const MeshWeight1D& w, const ExactRational& delta, const WeightClass& c) {
  return IntersectionVerifier(w.domain, delta).verify(w, c);
}

VerificationReport rh1_ainfty_relation(const MeshWeight1D& w) {
  const Partition part = Partition::mesh(w.domain);
  const WeightScanner scan(w, part);
  const double rh1 = scan.continuous(WeightClass::rh(1.0)).value;
  const double ainf = scan.continuous(WeightClass::ap(kInf)).value;
  VerificationReport rep;
  rep.name = "rh1-ainf";
  rep.constants["rh1"] = rh1;
  rep.constants["ainf"] = ainf;
  // Upper relation A_inf <= C e^(e^RH1) / e^RH1 with unspecified C: ratio only.
  rep.constants["ainf / (e^e^rh1 / e^rh1)"] = ainf / (std::exp(std::exp(rh1)) / std::exp(rh1));
  rep.check("rh1 / e <= ainf", false).record(rh1 / std::exp(1.0), ainf);
  return rep;
}

MeshWeight1D generate_dyadic_doubling(std::uint64_t seed, const Domain& domain, double ratio_bound) {
  if (!(ratio_bound >= 1.0)) throw DomainError("cascade ratio bound must be >= 1");
  Rng rng(seed);
  const std::size_t n = domain.cells();
  const double lo = 1.0 / (1.0 + ratio_bound);
  const double hi = ratio_bound / (1.0 + ratio_bound);
  std::vector<double> mass{1.0};
  while (mass.size() < n) {
    std::vector<double> next(2 * mass.size());
    for (std::size_t k = 0; k < mass.size(); ++k) {
      const double f = rng.uniform(lo, hi);
      next[2 * k] = mass[k] * f;
      next[2 * k + 1] = mass[k] * (1.0 - f);
    }
    mass = std::move(next);
  }
  const double scale = static_cast<double>(n) / domain.length().to_double();
  for (double& m : mass) m *= scale;
  return MeshWeight1D::make(domain, std::move(mass));
}

}  // namespace dyadic
