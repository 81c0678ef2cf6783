#include "dyadic/product.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dyadic/haar.hpp"
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

void require_torus(const Domain& a, const Domain& b) {
  if (!a.is_torus() || !b.is_torus()) throw DomainError("two-parameter analysis runs on the torus squared");
}

void require_plane(const Plane& plane, const Domain& a, const Domain& b) {
  require_torus(a, b);
  if (!(plane.first.domain() == a) || !(plane.second.domain() == b)) {
    throw DomainError("data and plane use different domains");
  }
}

// Summed-area table of per-sub-cell masses, unrolled to 2K x 2K.
class AreaTable {
 public:
  template <class Mass>
  AreaTable(const Plane& plane, Mass mass) : k1_(plane.k1()), k2_(plane.k2()), w_(2 * k2_ + 1) {
    s_.assign((2 * k1_ + 1) * w_, 0.0);
    for (std::size_t a = 0; a < 2 * k1_; ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < 2 * k2_; ++b) {
        row += mass(a % k1_, b % k2_);
        s_[(a + 1) * w_ + b + 1] = s_[a * w_ + b + 1] + row;
      }
    }
  }

  double rect(const Span& x, const Span& y) const {
    return s_[x.end() * w_ + y.end()] - s_[x.start * w_ + y.end()] - s_[x.end() * w_ + y.start] +
           s_[x.start * w_ + y.start];
  }

 private:
  std::size_t k1_;
  std::size_t k2_;
  std::size_t w_;
  std::vector<double> s_;
};

std::vector<double> sub_lengths(const Partition& p) {
  std::vector<double> out(p.lengths().begin(), p.lengths().begin() + static_cast<long>(p.size()));
  return out;
}

// Value of f on sub-cell (a, b).
double sub_value(const MeshFunction2D& f, const Plane& plane, std::size_t a, std::size_t b) {
  return f.at(plane.first.cell(a), plane.second.cell(b));
}

bool span_inside(const Span& inner, const Span& outer, std::size_t k) {
  const std::size_t off = (inner.start + k - outer.start) % k;
  return off + inner.span <= outer.span;
}

struct FactorTerm {
  std::optional<IntervalId> id;
  Span span;
  std::optional<Span> left;  // halves of a Haar interval
  std::optional<Span> right;
  double scale = 1.0;
};

std::vector<FactorTerm> factor_terms(const GridSpec& grid, const Partition& part) {
  std::vector<FactorTerm> out;
  for (int n = 0; n < part.domain().finest; ++n) {
    const double scale = std::sqrt(std::ldexp(1.0, n));  // |I|^-1/2
    for (const IntervalId& id : resident_intervals(grid, n)) {
      const Span s = part.span_of(id);
      const std::size_t h = s.span / 2;
      out.push_back({id, s, Span{s.start, h}, Span{s.start + h, h}, scale});
    }
  }
  return out;
}

nlohmann::ordered_json id_json(const std::optional<IntervalId>& id) {
  if (!id) return nullptr;
  return {{"grid", id->grid.tag()}, {"level", id->level}, {"index", id->index.get_str()}};
}

std::string point_name(const Plane& plane, std::size_t a, std::size_t b) {
  return "(x, y) = (" + plane.first.point(a).str() + ", " + plane.second.point(b).str() + ")";
}

}  // namespace

std::string GridPair::tag() const {
  auto one = [](const GridSpec& g) { return g.family == Family::Standard ? std::string("d") : std::string("delta"); };
  const std::string a = one(first);
  const std::string b = one(second);
  return a == "d" && b == "d" ? "dd" : a + "," + b;
}

std::array<GridPair, 4> GridPair::all(const Domain& first, const Domain& second, const ExactRational& delta) {
  const GridSpec d1 = GridSpec::standard(first);
  const GridSpec d2 = GridSpec::standard(second);
  const GridSpec s1 = GridSpec::shifted(delta, first);
  const GridSpec s2 = GridSpec::shifted(delta, second);
  return {GridPair{d1, d2}, GridPair{d1, s2}, GridPair{s1, d2}, GridPair{s1, s2}};
}

GridPair GridPair::standard(const Domain& first, const Domain& second) {
  return GridPair{GridSpec::standard(first), GridSpec::standard(second)};
}

Plane Plane::mesh(const Domain& first, const Domain& second) {
  return Plane{Partition::mesh(first), Partition::mesh(second)};
}

Plane Plane::refined(const Domain& first, const Domain& second, const ExactRational& delta) {
  return Plane{Partition::refined(first, delta), Partition::refined(second, delta)};
}

Plane Plane::for_pair(const GridPair& pair) {
  auto part = [](const GridSpec& g) {
    return g.family == Family::Standard ? Partition::mesh(g.domain) : Partition::refined(g.domain, *g.delta);
  };
  return Plane{part(pair.first), part(pair.second)};
}

std::vector<char> OpenSetApprox::rasterize(const Plane& plane) const {
  const std::size_t k1 = plane.k1();
  const std::size_t k2 = plane.k2();
  std::vector<char> in(k1 * k2, 0);
  for (const MeshRectangle& r : rectangles) {
    const Span x = plane.first.locate(r.q1);
    const Span y = plane.second.locate(r.q2);
    for (std::size_t a = x.start; a < x.end(); ++a) {
      for (std::size_t b = y.start; b < y.end(); ++b) in[(a % k1) * k2 + b % k2] = 1;
    }
  }
  return in;
}

ExactRational OpenSetApprox::measure(const Plane& plane) const {
  const std::vector<char> in = rasterize(plane);
  const std::size_t k1 = plane.k1();
  const std::size_t k2 = plane.k2();
  std::vector<ExactRational> l1(k1);
  std::vector<ExactRational> l2(k2);
  for (std::size_t a = 0; a < k1; ++a) l1[a] = plane.first.point(a + 1) - plane.first.point(a);
  for (std::size_t b = 0; b < k2; ++b) l2[b] = plane.second.point(b + 1) - plane.second.point(b);
  ExactRational total(0);
  for (std::size_t a = 0; a < k1; ++a) {
    ExactRational row(0);
    for (std::size_t b = 0; b < k2; ++b) {
      if (in[a * k2 + b]) row += l2[b];
    }
    total += row * l1[a];
  }
  return total;
}

double Haar2Coefficients::energy() const {
  Accumulator acc;
  for (const Haar2Term& t : terms) acc.add(t.coeff * t.coeff);
  return acc.value();
}

nlohmann::ordered_json Haar2Coefficients::to_json() const {
  nlohmann::ordered_json j;
  j["pair"] = pair.tag();
  if (pair.first.delta) j["delta"] = pair.first.delta->str();
  else if (pair.second.delta) j["delta"] = pair.second.delta->str();
  j["tail"] = tail;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Haar2Term& t : terms) {
    arr.push_back({{"first", id_json(t.first)}, {"second", id_json(t.second)}, {"coeff", t.coeff}});
  }
  j["coefficients"] = arr;
  return j;
}

Haar2Coefficients haar2_transform(const MeshFunction2D& f, const GridPair& pair) {
  return haar2_transform(f, pair, Plane::for_pair(pair));
}

Haar2Coefficients haar2_transform(const MeshFunction2D& f, const GridPair& pair, const Plane& plane) {
  require_plane(plane, f.first, f.second);
  if (!(pair.first.domain == f.first) || !(pair.second.domain == f.second)) {
    throw DomainError("grid pair and function use different domains");
  }
  const std::vector<double> l1 = sub_lengths(plane.first);
  const std::vector<double> l2 = sub_lengths(plane.second);
  const AreaTable sat(plane, [&](std::size_t a, std::size_t b) { return sub_value(f, plane, a, b) * l1[a] * l2[b]; });

  Haar2Coefficients h{pair, plane, {}, 0, 0.0};
  const std::vector<FactorTerm> t1 = factor_terms(pair.first, plane.first);
  const std::vector<FactorTerm> t2 = factor_terms(pair.second, plane.second);
  const FactorTerm one1{std::nullopt, Span{0, plane.k1()}, std::nullopt, std::nullopt, 1.0};
  const FactorTerm one2{std::nullopt, Span{0, plane.k2()}, std::nullopt, std::nullopt, 1.0};

  // Integral of f against u x v, where a factor is either a Haar function or 1.
  auto coefficient = [&](const FactorTerm& u, const FactorTerm& v) {
    auto pieces = [](const FactorTerm& t) {
      std::vector<std::pair<Span, double>> p;
      if (t.left) {
        p.emplace_back(*t.left, 1.0);
        p.emplace_back(*t.right, -1.0);
      } else {
        p.emplace_back(t.span, 1.0);
      }
      return p;
    };
    double s = 0.0;
    for (const auto& [x, sx] : pieces(u)) {
      for (const auto& [y, sy] : pieces(v)) s += sx * sy * sat.rect(x, y);
    }
    return s * u.scale * v.scale;
  };

  for (const FactorTerm& u : t1) {
    for (const FactorTerm& v : t2) h.terms.push_back({u.id, v.id, u.span, v.span, coefficient(u, v)});
  }
  h.tensor_count = h.terms.size();
  for (const FactorTerm& u : t1) h.terms.push_back({u.id, std::nullopt, u.span, one2.span, coefficient(u, one2)});
  for (const FactorTerm& v : t2) h.terms.push_back({std::nullopt, v.id, one1.span, v.span, coefficient(one1, v)});
  h.terms.push_back({std::nullopt, std::nullopt, one1.span, one2.span, coefficient(one1, one2)});

  // Energy of f minus its means on the level-L rectangles of the pair.
  Accumulator tail;
  const int depth1 = f.first.finest;
  const int depth2 = f.second.finest;
  const double cell_area = std::ldexp(1.0, -depth1 - depth2);
  for (const Span& x : plane.first.grid_spans(pair.first, depth1)) {
    for (const Span& y : plane.second.grid_spans(pair.second, depth2)) {
      const double mean = sat.rect(x, y) / cell_area;
      for (std::size_t a = x.start; a < x.end(); ++a) {
        for (std::size_t b = y.start; b < y.end(); ++b) {
          const std::size_t aa = a % plane.k1();
          const std::size_t bb = b % plane.k2();
          const double d = sub_value(f, plane, aa, bb) - mean;
          tail.add(d * d * l1[aa] * l2[bb]);
        }
      }
    }
  }
  h.tail = tail.value();
  return h;
}

double l2_norm_squared(const MeshFunction2D& f) {
  Accumulator acc;
  for (double v : f.values) acc.add(v * v);
  return acc.value() * std::ldexp(1.0, -f.first.finest - f.second.finest);
}

VerificationReport parseval2_check(const MeshFunction2D& f, const ExactRational& delta) {
  require_torus(f.first, f.second);
  VerificationReport rep;
  rep.name = "parseval-2d";
  rep.parameters["delta"] = delta.str();
  const double norm = l2_norm_squared(f);
  rep.constants["||f||^2"] = norm;
  for (const GridPair& pair : GridPair::all(f.first, f.second, delta)) {
    const Haar2Coefficients h = haar2_transform(f, pair);
    const double total = h.energy() + h.tail;
    rep.constants[pair.tag() + ".tail"] = h.tail;
    rep.check(pair.tag() + ": |sum c^2 + tail - ||f||^2| <= 1e-12 ||f||^2", true)
        .record(std::fabs(total - norm), kIdentityTol * norm);
  }
  return rep;
}

ProductBMOReport product_bmo_dyadic(const MeshFunction2D& f, const GridPair& pair,
                                    const std::vector<OpenSetApprox>& omegas) {
  return product_bmo_dyadic(haar2_transform(f, pair), omegas);
}

ProductBMOReport product_bmo_dyadic(const Haar2Coefficients& c, const std::vector<OpenSetApprox>& omegas) {
  if (omegas.empty()) throw DomainError("product BMO needs at least one open set");
  const Plane& plane = c.plane;
  const std::size_t k1 = plane.k1();
  const std::size_t k2 = plane.k2();
  ProductBMOReport rep;
  rep.pair = c.pair.tag();

  for (const OpenSetApprox& omega : omegas) {
    const std::vector<char> in = omega.rasterize(plane);
    const AreaTable count(plane, [&](std::size_t a, std::size_t b) { return in[a * k2 + b] ? 1.0 : 0.0; });
    Accumulator sum;
    for (std::size_t t = 0; t < c.tensor_count; ++t) {
      const Haar2Term& r = c.terms[t];
      const double full = static_cast<double>(r.span1.span * r.span2.span);
      if (count.rect(r.span1, r.span2) == full) sum.add(r.coeff * r.coeff);
    }
    const double measure = omega.measure(plane).to_double();
    rep.carleson_sums.push_back(sum.value());
    rep.measures.push_back(measure);
    rep.supplied.push_back(sum.value() / measure);
  }

  std::size_t best_single = 0;
  for (std::size_t t = 0; t < c.tensor_count; ++t) {
    const Haar2Term& r = c.terms[t];
    Accumulator sum;
    for (std::size_t s = 0; s < c.tensor_count; ++s) {
      const Haar2Term& q = c.terms[s];
      if (span_inside(q.span1, r.span1, k1) && span_inside(q.span2, r.span2, k2)) sum.add(q.coeff * q.coeff);
    }
    const double area = std::ldexp(1.0, -r.first->level - r.second->level);
    const double v = sum.value() / area;
    if (t == 0 || v > rep.singles) {
      rep.singles = v;
      best_single = t;
    }
  }

  rep.value = rep.singles;
  rep.argmax = omegas.size() + best_single;
  for (std::size_t i = 0; i < rep.supplied.size(); ++i) {
    if (rep.supplied[i] >= rep.value) {
      rep.value = rep.supplied[i];
      rep.argmax = i;
    }
  }
  return rep;
}

VerificationReport verify_product_bmo(const MeshFunction2D& f, const ExactRational& delta,
                                      const std::vector<OpenSetApprox>& omegas) {
  require_torus(f.first, f.second);
  if (omegas.empty()) throw DomainError("product BMO needs at least one open set");
  VerificationReport rep;
  rep.name = "product-bmo";
  rep.parameters["delta"] = delta.str();
  rep.parameters["sets"] = std::to_string(omegas.size());
  double sup = 0.0;
  for (double v : f.values) sup = std::max(sup, std::fabs(v));
  const double scale = sup * sup;
  const Plane plane = Plane::refined(f.first, f.second, delta);
  const std::size_t k2 = plane.k2();
  const std::vector<double> l1 = sub_lengths(plane.first);
  const std::vector<double> l2 = sub_lengths(plane.second);

  for (const GridPair& pair : GridPair::all(f.first, f.second, delta)) {
    const std::string tag = pair.tag();
    const Haar2Coefficients c = haar2_transform(f, pair, plane);
    const ProductBMOReport full = product_bmo_dyadic(c, omegas);
    rep.constants[tag + ".value"] = full.value;
    double total = 0.0;
    {
      Accumulator acc;
      for (std::size_t t = 0; t < c.tensor_count; ++t) acc.add(c.terms[t].coeff * c.terms[t].coeff);
      total = acc.value();
    }
    Check& bessel = rep.check(tag + ": sum_{R in Omega} c_R^2 <= ||f 1_Omega||^2", false);
    bessel.abs_floor = kRelTol * scale;
    Check& sup_bound = rep.check(tag + ": sum_{R in Omega} c_R^2 <= ||f||_inf^2 |Omega|", false);
    sup_bound.abs_floor = kRelTol * scale;
    Check& subset = rep.check(tag + ": sum_{R in Omega} c_R^2 <= sum_R c_R^2", false);
    subset.abs_floor = kRelTol * scale;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      const std::vector<char> in = omegas[i].rasterize(plane);
      Accumulator local;
      for (std::size_t a = 0; a < plane.k1(); ++a) {
        for (std::size_t b = 0; b < k2; ++b) {
          if (!in[a * k2 + b]) continue;
          const double v = sub_value(f, plane, a, b);
          local.add(v * v * l1[a] * l2[b]);
        }
      }
      auto witness = [&] { return "set " + std::to_string(i); };
      bessel.record(full.carleson_sums[i], local.value(), witness);
      sup_bound.record(full.carleson_sums[i], scale * full.measures[i], witness);
      subset.record(full.carleson_sums[i], total, witness);
    }
    // The reported max along growing prefixes of the family.
    Check& mono = rep.check(tag + ": value(prefix) <= value(longer prefix)", true);
    double previous = 0.0;
    for (std::size_t n = 1;; n = std::min(2 * n, omegas.size())) {
      const std::vector<OpenSetApprox> prefix(omegas.begin(), omegas.begin() + static_cast<long>(n));
      const double v = product_bmo_dyadic(c, prefix).value;
      mono.record(previous, v, [&] { return "prefix of " + std::to_string(n) + " sets"; });
      previous = v;
      if (n == omegas.size()) break;
    }
  }
  rep.notes.push_back("values are maxima over the supplied sets and single rectangles: lower bounds of the sup over open sets");
  return rep;
}

std::vector<double> strong_maximal_on(const MeshFunction2D& f, const Plane& plane, const StrongFamily& family,
                                      const MeshWeight2D* w) {
  require_plane(plane, f.first, f.second);
  if (w && (!(w->first == f.first) || !(w->second == f.second))) {
    throw DomainError("function and weight use different domains");
  }
  const simd::Kernels& kern = simd::active();
  const std::size_t k1 = plane.k1();
  const std::size_t k2 = plane.k2();
  const std::vector<double> l1 = sub_lengths(plane.first);
  const std::vector<double> l2 = sub_lengths(plane.second);

  // Running integrals along the first factor, unrolled: col[a][b] for a <= 2K1.
  std::vector<double> col_num((2 * k1 + 1) * k2, 0.0);
  std::vector<double> col_den((2 * k1 + 1) * k2, 0.0);
  for (std::size_t a = 0; a < 2 * k1; ++a) {
    const std::size_t aa = a % k1;
    for (std::size_t b = 0; b < k2; ++b) {
      const double wv = w ? w->at(plane.first.cell(aa), plane.second.cell(b)) : 1.0;
      const double m = l1[aa] * l2[b];
      col_num[(a + 1) * k2 + b] = col_num[a * k2 + b] + std::fabs(sub_value(f, plane, aa, b)) * wv * m;
      col_den[(a + 1) * k2 + b] = col_den[a * k2 + b] + wv * m;
    }
  }
  // Running integrals along the second factor of the strip [a, a + n).
  std::vector<double> num(2 * k2 + 1);
  std::vector<double> den(2 * k2 + 1);
  auto strip = [&](std::size_t a, std::size_t n) {
    num[0] = 0.0;
    den[0] = 0.0;
    for (std::size_t t = 0; t < 2 * k2; ++t) {
      const std::size_t b = t % k2;
      num[t + 1] = num[t] + (col_num[(a + n) * k2 + b] - col_num[a * k2 + b]);
      den[t + 1] = den[t] + (col_den[(a + n) * k2 + b] - col_den[a * k2 + b]);
    }
  };

  std::vector<double> out(k1 * k2, 0.0);
  if (family.pair) {
    const GridPair& p = *family.pair;
    const std::vector<Span> s1 = grid_family(plane.first, p.first, 0, f.first.finest);
    const std::vector<Span> s2 = grid_family(plane.second, p.second, 0, f.second.finest);
    for (const Span& x : s1) {
      strip(x.start, x.span);
      for (const Span& y : s2) {
        const double v = (num[y.end()] - num[y.start]) / (den[y.end()] - den[y.start]);
        for (std::size_t a = x.start; a < x.end(); ++a) {
          double* row = out.data() + (a % k1) * k2;
          for (std::size_t b = y.start; b < y.end(); ++b) row[b % k2] = std::max(row[b % k2], v);
        }
      }
    }
    return out;
  }

  // rows[n - 1]: for the strip [a, a + n), the best average over spans in the
  // second factor containing each sub-cell; then the best over strips reaching
  // past each offset.
  std::vector<double> rows(k1 * k2);
  std::vector<double> acc(2 * k2);
  std::vector<double> line(k2);
  for (std::size_t a = 0; a < k1; ++a) {
    for (std::size_t n = 1; n <= k1; ++n) {
      strip(a, n);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t b = 0; b < k2; ++b) {
        kern.ratio_row(num.data() + b + 1, den.data() + b + 1, num[b], den[b], line.data(), k2);
        for (std::size_t j = k2 - 1; j-- > 0;) line[j] = std::max(line[j], line[j + 1]);
        kern.max_into(acc.data() + b, line.data(), k2);
      }
      double* row = rows.data() + (n - 1) * k2;
      for (std::size_t b = 0; b < k2; ++b) row[b] = std::max(acc[b], acc[b + k2]);
    }
    for (std::size_t n = k1 - 1; n-- > 0;) kern.max_into(rows.data() + n * k2, rows.data() + (n + 1) * k2, k2);
    for (std::size_t j = 0; j < k1; ++j) kern.max_into(out.data() + ((a + j) % k1) * k2, rows.data() + j * k2, k2);
  }
  return out;
}

MeshFunction2D strong_maximal(const MeshFunction2D& f, const StrongFamily& family, const std::optional<MeshWeight2D>& w) {
  require_torus(f.first, f.second);
  const Plane plane = family.pair ? Plane::for_pair(*family.pair) : Plane::mesh(f.first, f.second);
  const std::vector<double> sub = strong_maximal_on(f, plane, family, w ? &*w : nullptr);
  std::vector<double> out(f.values.size());
  for (std::size_t i = 0; i < f.n1(); ++i) {
    for (std::size_t j = 0; j < f.n2(); ++j) {
      out[i * f.n2() + j] = sub[i * plane.first.stride() * plane.k2() + j * plane.second.stride()];
    }
  }
  return MeshFunction2D{f.first, f.second, out};
}

double slice_doubling_constant(const MeshWeight2D& w, const ExactRational& delta) {
  require_torus(w.first, w.second);
  const Shift shift = Shift::make(delta);
  double best = 0.0;
  for (std::size_t j = 0; j < w.n2(); ++j) {
    std::vector<double> v(w.n1());
    for (std::size_t i = 0; i < w.n1(); ++i) v[i] = w.at(i, j);
    best = std::max(best, grid_doubling_constant(MeshWeight1D::make(w.first, v), shift));
  }
  for (std::size_t i = 0; i < w.n1(); ++i) {
    std::vector<double> v(w.values.begin() + static_cast<long>(i * w.n2()),
                          w.values.begin() + static_cast<long>((i + 1) * w.n2()));
    best = std::max(best, grid_doubling_constant(MeshWeight1D::make(w.second, v), shift));
  }
  return best;
}

VerificationReport verify_strong_maximal_comparability(const MeshFunction2D& f, const ExactRational& delta,
                                                       const std::optional<MeshWeight2D>& w) {
  require_torus(f.first, f.second);
  const Shift shift = Shift::make(delta);
  const Plane plane = Plane::refined(f.first, f.second, delta);
  const MeshWeight2D* wp = w ? &*w : nullptr;
  const std::vector<double> m = strong_maximal_on(f, plane, StrongFamily::continuous(), wp);
  const std::array<GridPair, 4> pairs = GridPair::all(f.first, f.second, delta);
  std::array<std::vector<double>, 4> md;
  for (std::size_t p = 0; p < 4; ++p) md[p] = strong_maximal_on(f, plane, StrongFamily::of(pairs[p]), wp);

  const double big_c = shift.covering_value();
  VerificationReport rep;
  rep.name = w ? "weighted-strong-maximal-comparability" : "strong-maximal-comparability";
  rep.parameters["delta"] = delta.str();
  rep.parameters["L"] = std::to_string(f.first.finest) + "," + std::to_string(f.second.finest);
  rep.constants["C(delta)"] = big_c;
  double factor = big_c * big_c;
  if (w) {
    const double cdy = slice_doubling_constant(*w, delta);
    factor *= std::pow(cdy, 2.0 * std::log2(4.0 * big_c));
    rep.constants["C_dy"] = cdy;
  }
  rep.constants["factor"] = factor;

  std::array<Check*, 4> forward{};
  for (std::size_t p = 0; p < 4; ++p) forward[p] = &rep.check("M_" + pairs[p].tag() + " <= M_s", true);
  Check& sum = rep.check("sum of the four <= 4 M_s", true);
  Check& reverse = rep.check(w ? "M_s <= C^2 C_dy^(2 log2(4C)) (sum of the four)" : "M_s <= C^2 max of the four",
                             false);
  const std::size_t k2 = plane.k2();
  for (std::size_t c = 0; c < m.size(); ++c) {
    auto witness = [&] { return point_name(plane, c / k2, c % k2); };
    for (std::size_t p = 0; p < 4; ++p) forward[p]->record(md[p][c], m[c], witness);
    // Pairwise sums keep the bound exact: each half is at most 2 M_s.
    const double total = (md[0][c] + md[1][c]) + (md[2][c] + md[3][c]);
    sum.record(total, 4.0 * m[c], witness);
    const double grid = w ? total : std::max(std::max(md[0][c], md[1][c]), std::max(md[2][c], md[3][c]));
    reverse.record(m[c], factor * grid, witness);
  }
  return rep;
}

double rectangle_ap(const MeshWeight2D& w, double p, const std::optional<GridPair>& pair) {
  const Plane plane = pair ? Plane::for_pair(*pair) : Plane::mesh(w.first, w.second);
  return rectangle_ap(w, p, plane, pair);
}

double rectangle_ap(const MeshWeight2D& w, double p, const Plane& plane, const std::optional<GridPair>& pair) {
  require_plane(plane, w.first, w.second);
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("rectangle A_p needs a finite p >= 1");
  const std::size_t k1 = plane.k1();
  const std::size_t k2 = plane.k2();
  const std::vector<double> l1 = sub_lengths(plane.first);
  const std::vector<double> l2 = sub_lengths(plane.second);
  const std::vector<double>& x1 = plane.first.coords();
  const std::vector<double>& x2 = plane.second.coords();

  // Admissible spans per factor: start < K, length 1..K.
  auto admissible = [](const Partition& part, const std::optional<GridSpec>& grid) {
    const std::size_t k = part.size();
    std::vector<char> ok(k * (k + 1), 0);
    if (grid) {
      for (const Span& s : grid_family(part, *grid, 0, part.domain().finest)) ok[s.start * (k + 1) + s.span] = 1;
    } else {
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t n = part.stride(); n <= k; ++n) ok[a * (k + 1) + n] = 1;
      }
    }
    return ok;
  };
  const std::vector<char> ok1 = admissible(plane.first, pair ? std::optional(pair->first) : std::nullopt);
  const std::vector<char> ok2 = admissible(plane.second, pair ? std::optional(pair->second) : std::nullopt);

  const double q = p > 1.0 ? -1.0 / (p - 1.0) : 0.0;
  std::vector<double> sw(k1 * k2);
  std::vector<double> ss(k1 * k2);
  for (std::size_t a = 0; a < k1; ++a) {
    for (std::size_t b = 0; b < k2; ++b) {
      const double v = w.at(plane.first.cell(a), plane.second.cell(b));
      sw[a * k2 + b] = v;
      ss[a * k2 + b] = p > 1.0 ? std::pow(v, q) : v;
    }
  }

  double best = 0.0;
  std::vector<double> cw(k2);
  std::vector<double> cs(k2);
  std::vector<double> cmin(k2);
  for (std::size_t a = 0; a < k1; ++a) {
    std::fill(cw.begin(), cw.end(), 0.0);
    std::fill(cs.begin(), cs.end(), 0.0);
    std::fill(cmin.begin(), cmin.end(), std::numeric_limits<double>::infinity());
    for (std::size_t n = 1; n <= k1; ++n) {
      const std::size_t aa = (a + n - 1) % k1;
      for (std::size_t b = 0; b < k2; ++b) {
        cw[b] += sw[aa * k2 + b] * l1[aa];
        cs[b] += ss[aa * k2 + b] * l1[aa];
        cmin[b] = std::min(cmin[b], sw[aa * k2 + b]);
      }
      if (!ok1[a * (k1 + 1) + n]) continue;
      const double len1 = x1[a + n] - x1[a];
      for (std::size_t b0 = 0; b0 < k2; ++b0) {
        double tw = 0.0;
        double ts = 0.0;
        double tmin = std::numeric_limits<double>::infinity();
        for (std::size_t m = 1; m <= k2; ++m) {
          const std::size_t bb = (b0 + m - 1) % k2;
          tw += cw[bb] * l2[bb];
          ts += cs[bb] * l2[bb];
          tmin = std::min(tmin, cmin[bb]);
          if (!ok2[b0 * (k2 + 1) + m]) continue;
          const double area = len1 * (x2[b0 + m] - x2[b0]);
          const double v = p > 1.0 ? (tw / area) * std::pow(ts / area, p - 1.0) : (tw / area) / tmin;
          best = std::max(best, v);
        }
      }
    }
  }
  return best;
}

VerificationReport product_weight_check(const MeshWeight2D& w, double p, const ExactRational& delta) {
  require_torus(w.first, w.second);
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("product weight check needs a finite p >= 1");
  const Shift shift = Shift::make(delta);
  const double big_c = shift.covering_value();
  const Plane plane = Plane::refined(w.first, w.second, delta);
  const WeightClass cls = WeightClass::ap(p);
  VerificationReport rep;
  rep.name = "product-weight";
  rep.parameters["delta"] = delta.str();
  std::ostringstream ps;
  ps << p;
  rep.parameters["p"] = ps.str();
  rep.constants["C(delta)"] = big_c;

  // One-parameter constants of every slice, along each axis.
  auto slices = [&](const std::string& axis, const Partition& part, const std::vector<MeshWeight1D>& ws) {
    const GridSpec gd = GridSpec::standard(part.domain());
    const GridSpec gs = GridSpec::shifted(delta, part.domain());
    const std::vector<Span> sd = grid_family(part, gd, 0, part.domain().finest);
    const std::vector<Span> st = grid_family(part, gs, 0, part.domain().finest);
    double cont = 0.0;
    double s_std = 0.0;
    double s_delta = 0.0;
    Check& fd = rep.check(axis + " slices: std <= continuous", true);
    Check& ft = rep.check(axis + " slices: delta <= continuous", true);
    Check& bound = rep.check(axis + " slices: continuous <= C^p max(std, delta)", false);
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const WeightScanner scan(ws[i], part);
      const double c = scan.continuous(cls).value;
      const double d = scan.over(cls, sd, "std").value;
      const double t = scan.over(cls, st, "delta").value;
      auto witness = [&] { return axis + " slice " + std::to_string(i); };
      fd.record(d, c, witness);
      ft.record(t, c, witness);
      bound.record(c, std::pow(big_c, p) * std::max(d, t), witness);
      cont = std::max(cont, c);
      s_std = std::max(s_std, d);
      s_delta = std::max(s_delta, t);
    }
    rep.constants[axis + ".continuous"] = cont;
    rep.constants[axis + ".std"] = s_std;
    rep.constants[axis + ".delta"] = s_delta;
  };
  std::vector<MeshWeight1D> along_first;
  for (std::size_t j = 0; j < w.n2(); ++j) {
    std::vector<double> v(w.n1());
    for (std::size_t i = 0; i < w.n1(); ++i) v[i] = w.at(i, j);
    along_first.push_back(MeshWeight1D::make(w.first, v));
  }
  std::vector<MeshWeight1D> along_second;
  for (std::size_t i = 0; i < w.n1(); ++i) {
    along_second.push_back(MeshWeight1D::make(
        w.second, std::vector<double>(w.values.begin() + static_cast<long>(i * w.n2()),
                                      w.values.begin() + static_cast<long>((i + 1) * w.n2()))));
  }
  slices("x", plane.first, along_first);
  slices("y", plane.second, along_second);

  const double cont = rectangle_ap(w, p, plane, std::nullopt);
  rep.constants["rectangles.continuous"] = cont;
  double best = 0.0;
  for (const GridPair& pair : GridPair::all(w.first, w.second, delta)) {
    const double v = rectangle_ap(w, p, plane, pair);
    rep.constants["rectangles." + pair.tag()] = v;
    rep.check("rectangles: " + pair.tag() + " <= continuous", true).record(v, cont);
    best = std::max(best, v);
  }
  const double bound = std::pow(big_c, 2.0 * p) * best;
  rep.constants["rectangles.bound"] = bound;
  rep.check("rectangles: continuous <= C^(2p) max of the four", false).record(cont, bound);
  return rep;
}

double product_h1_dyadic_norm(const MeshFunction2D& f, const GridPair& pair) {
  const Haar2Coefficients c = haar2_transform(f, pair);
  const Plane& plane = c.plane;
  const std::size_t k1 = plane.k1();
  const std::size_t k2 = plane.k2();
  std::vector<double> square(k1 * k2, 0.0);
  for (std::size_t t = 0; t < c.tensor_count; ++t) {
    const Haar2Term& r = c.terms[t];
    const double v = r.coeff * r.coeff * std::ldexp(1.0, r.first->level + r.second->level);
    for (std::size_t a = r.span1.start; a < r.span1.end(); ++a) {
      for (std::size_t b = r.span2.start; b < r.span2.end(); ++b) square[(a % k1) * k2 + b % k2] += v;
    }
  }
  const std::vector<double> l1 = sub_lengths(plane.first);
  const std::vector<double> l2 = sub_lengths(plane.second);
  Accumulator acc;
  for (std::size_t a = 0; a < k1; ++a) {
    for (std::size_t b = 0; b < k2; ++b) acc.add(std::sqrt(square[a * k2 + b]) * l1[a] * l2[b]);
  }
  return acc.value();
}

double product_bmo_norm(const MeshFunction2D& g, const GridPair& pair, const std::vector<OpenSetApprox>& omegas) {
  return std::sqrt(product_bmo_dyadic(g, pair, omegas).value);
}

double duality_ratio(std::uint64_t seed, std::size_t pairs, const GridPair& pair,
                     const std::vector<OpenSetApprox>& omegas) {
  const Domain& d1 = pair.first.domain;
  const Domain& d2 = pair.second.domain;
  const double cell = std::ldexp(1.0, -d1.finest - d2.finest);
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const MeshFunction2D f = generate_finite_product_haar(seed + 2 * i, d1, d2, 3);
    const MeshFunction2D g = generate_finite_product_haar(seed + 2 * i + 1, d1, d2, 6);
    Accumulator dot;
    for (std::size_t c = 0; c < f.values.size(); ++c) dot.add(f.values[c] * g.values[c] * cell);
    const double h1 = product_h1_dyadic_norm(f, pair);
    const double bmo = product_bmo_norm(g, pair, omegas);
    if (h1 > 0.0 && bmo > 0.0) worst = std::max(worst, std::fabs(dot.value()) / (h1 * bmo));
  }
  return worst;
}

MeshWeight2D tensor_weight(const MeshWeight1D& u, const MeshWeight1D& v) {
  std::vector<double> out(u.size() * v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) out[i * v.size() + j] = u.values[i] * v.values[j];
  }
  return MeshWeight2D::make(u.domain, v.domain, out);
}

MeshFunction2D generate_finite_product_haar(std::uint64_t seed, const Domain& first, const Domain& second, int terms) {
  require_torus(first, second);
  Rng rng(seed);
  const std::size_t n2 = second.cells();
  std::vector<double> out(first.cells() * n2, 0.0);
  for (int t = 0; t < terms; ++t) {
    auto pick = [&](const Domain& d) {
      const int level = static_cast<int>(rng.integer(0, d.finest - 1));
      const long index = rng.integer(0, (1L << level) - 1);
      return haar_function(IntervalId{GridSpec::standard(d), level, index});
    };
    const MeshFunction1D hx = pick(first);
    const MeshFunction1D hy = pick(second);
    const double c = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < hx.size(); ++i) {
      if (hx.values[i] == 0.0) continue;
      for (std::size_t j = 0; j < n2; ++j) out[i * n2 + j] += c * hx.values[i] * hy.values[j];
    }
  }
  return MeshFunction2D::make(first, second, out);
}

MeshFunction2D generate_function2d(std::uint64_t seed, const Domain& first, const Domain& second) {
  Rng rng(seed);
  std::vector<double> out(first.cells() * second.cells());
  for (double& v : out) v = rng.uniform(-1.0, 1.0);
  return MeshFunction2D::make(first, second, out);
}

OpenSetApprox generate_staircase(std::uint64_t seed, const Domain& first, const Domain& second, int steps) {
  require_torus(first, second);
  if (steps < 1) throw DomainError("a staircase needs at least one step");
  Rng rng(seed);
  const long n1 = static_cast<long>(first.cells());
  const long n2 = static_cast<long>(second.cells());
  const long ox = rng.integer(0, n1 - 1);
  const long oy = rng.integer(0, n2 - 1);
  OpenSetApprox omega;
  long used = 0;
  long height = n2;
  for (int i = 0; i < steps && used < n1; ++i) {
    const long room = (n1 - used) / (steps - i);
    const long width = rng.integer(1, std::max(1L, room));
    height = rng.integer(1, height);
    const ExactRational left = ExactRational::dyadic(ox + used, first.finest).frac();
    const ExactRational bottom = ExactRational::dyadic(oy, second.finest);
    omega.rectangles.push_back(MeshRectangle{
        ArbitraryInterval{left, ExactRational::dyadic(width, first.finest), first},
        ArbitraryInterval{bottom, ExactRational::dyadic(height, second.finest), second}});
    used += width;
  }
  return omega;
}

}  // namespace dyadic
