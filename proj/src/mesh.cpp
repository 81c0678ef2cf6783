#include "dyadic/mesh.hpp"

#include <cmath>

#include "dyadic/report.hpp"

namespace dyadic {

namespace {

void check_values(const Domain& domain, const std::vector<double>& values, bool positive) {
  if (values.size() != domain.cells()) {
    throw DomainError("expected " + std::to_string(domain.cells()) + " mesh values, got " +
                      std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw DomainError("non-finite value at cell " + std::to_string(i));
    if (positive && !(values[i] > 0.0)) throw DomainError("weight must be positive at cell " + std::to_string(i));
  }
}

void check_values_2d(const Domain& a, const Domain& b, const std::vector<double>& values, bool positive) {
  if (values.size() != a.cells() * b.cells()) throw DomainError("2D value array has the wrong size");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw DomainError("non-finite 2D value");
    if (positive && !(values[i] > 0.0)) throw DomainError("2D weight must be positive");
  }
}

// Neumaier-compensated accumulator.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

MeshFunction1D MeshFunction1D::make(const Domain& domain, std::vector<double> values) {
  check_values(domain, values, false);
  return MeshFunction1D{domain, std::move(values)};
}

MeshWeight1D MeshWeight1D::make(const Domain& domain, std::vector<double> values) {
  check_values(domain, values, true);
  return MeshWeight1D{domain, std::move(values)};
}

MeshFunction2D MeshFunction2D::make(const Domain& first, const Domain& second, std::vector<double> values) {
  check_values_2d(first, second, values, false);
  return MeshFunction2D{first, second, std::move(values)};
}

MeshWeight2D MeshWeight2D::make(const Domain& first, const Domain& second, std::vector<double> values) {
  check_values_2d(first, second, values, true);
  return MeshWeight2D{first, second, std::move(values)};
}

Partition Partition::mesh(const Domain& domain) {
  Partition p;
  p.domain_ = domain;
  p.theta_ = 0;
  p.stride_ = 1;
  p.k_ = domain.cells();
  const double h = std::ldexp(1.0, -domain.finest);
  p.len_.assign(p.limit(), h);
  p.x_.resize(p.limit() + 1);
  for (std::size_t j = 0; j <= p.limit(); ++j) p.x_[j] = static_cast<double>(j) * h;
  return p;
}

Partition Partition::refined(const Domain& domain, const ExactRational& delta) {
  const Shift shift = Shift::make(delta);
  Partition p;
  p.domain_ = domain;
  p.delta_ = shift.delta;
  p.theta_ = shift.delta.mul_pow2(domain.finest).frac();
  p.stride_ = 2;
  p.k_ = 2 * domain.cells();
  const double h = std::ldexp(1.0, -domain.finest);
  const double lo = p.theta_.to_double() * h;
  const double hi = (ExactRational(1) - p.theta_).to_double() * h;
  p.len_.resize(p.limit());
  for (std::size_t j = 0; j < p.limit(); ++j) p.len_[j] = (j % 2 == 0) ? lo : hi;
  p.x_.resize(p.limit() + 1);
  for (std::size_t j = 0; j <= p.k_; ++j) {
    const std::size_t cell = j / 2;
    p.x_[j] = (j % 2 == 0) ? static_cast<double>(cell) * h
                           : ((ExactRational(static_cast<long>(cell)) + p.theta_).mul_pow2(-domain.finest)).to_double();
  }
  if (p.periodic()) {
    for (std::size_t j = p.k_ + 1; j <= p.limit(); ++j) p.x_[j] = 1.0 + p.x_[j - p.k_];
  }
  return p;
}

ExactRational Partition::point(std::size_t j) const {
  std::size_t turns = 0;
  if (periodic()) {
    turns = j / k_;
    j %= k_;
  }
  const std::size_t cell = j / stride_;
  ExactRational u(static_cast<long>(cell));
  if (j % stride_ != 0) u += theta_;
  return domain_.left() + u.mul_pow2(-domain_.finest) + ExactRational(static_cast<long>(turns));
}

std::optional<std::size_t> Partition::index_of(const ExactRational& x) const {
  const ExactRational y = (domain_.reduce(x) - domain_.left()).mul_pow2(domain_.finest);
  const mpz_class i = y.floor();
  if (i < 0 || i > static_cast<long>(domain_.cells())) return std::nullopt;
  const ExactRational r = y - ExactRational(i);
  const std::size_t cell = i.get_ui();
  std::size_t j;
  if (r.is_zero()) {
    j = cell * stride_;
  } else if (stride_ == 2 && r == theta_) {
    j = cell * 2 + 1;
  } else {
    return std::nullopt;
  }
  if (j > k_ || (periodic() && j == k_)) return std::nullopt;
  return j;
}

Span Partition::locate(const ArbitraryInterval& q) const {
  if (!(q.domain == domain_)) throw DomainError("interval and partition use different domains");
  if (q.length.sign() <= 0) throw DomainError("interval length must be positive");
  const auto a = index_of(q.left);
  if (!a) throw DomainError("left endpoint " + q.left.str() + " is not a breakpoint");
  if (periodic()) {
    if (q.length > ExactRational(1)) throw DomainError("torus arcs have length at most 1");
    if (q.length == ExactRational(1)) return Span{*a, k_};
    const auto b = index_of(q.right());
    if (!b) throw DomainError("right endpoint " + q.right().str() + " is not a breakpoint");
    const std::size_t end = (*b > *a) ? *b : *b + k_;
    return Span{*a, end - *a};
  }
  if (q.left < domain_.left() || q.right() > domain_.right()) throw DomainError("interval leaves the line window");
  const auto b = index_of(q.right());
  if (!b || *b <= *a) throw DomainError("right endpoint " + q.right().str() + " is not a breakpoint");
  return Span{*a, *b - *a};
}

ArbitraryInterval Partition::interval(const Span& s) const {
  const ExactRational left = point(s.start);
  return ArbitraryInterval{domain_.reduce(left), point(s.end()) - left, domain_};
}

Span Partition::span_of(const IntervalId& id) const {
  if (id.level > domain_.finest) throw DomainError("grid level below the mesh resolution");
  const Interval iv = dyadic::interval(id);
  const auto a = index_of(iv.left);
  if (!a) throw DomainError("grid endpoints are not breakpoints of this partition");
  const std::size_t span = (std::size_t{1} << (domain_.finest - id.level)) * stride_;
  return Span{*a, span};
}

std::vector<Span> Partition::grid_spans(const GridSpec& grid, int level) const {
  if (!(grid.domain == domain_)) throw DomainError("grid and partition use different domains");
  std::vector<Span> out;
  for (const IntervalId& id : resident_intervals(grid, level)) out.push_back(span_of(id));
  return out;
}

std::vector<Span> grid_family(const Partition& part, const GridSpec& grid, int min_level, int max_level) {
  std::vector<Span> out;
  for (int n = min_level; n <= max_level; ++n) {
    const auto spans = part.grid_spans(grid, n);
    out.insert(out.end(), spans.begin(), spans.end());
  }
  return out;
}

std::vector<double> Partition::expand(const std::vector<double>& cell_values) const {
  if (cell_values.size() != domain_.cells()) throw DomainError("cell value array has the wrong size");
  std::vector<double> out(limit());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = cell_values[cell(j)];
  return out;
}

PrefixTable::PrefixTable(const Partition& part, const std::vector<double>& cell_values) {
  const std::vector<double>& len = part.lengths();
  p_.resize(part.limit() + 1);
  Accumulator acc;
  p_[0] = 0.0;
  for (std::size_t j = 0; j < part.limit(); ++j) {
    acc.add(cell_values[part.cell(j)] * len[j]);
    p_[j + 1] = acc.value();
  }
}

namespace {

// Cells [first, first + count) of an aligned interval; count may wrap on the torus.
std::pair<std::size_t, std::size_t> aligned_cells(const Domain& dom, const ArbitraryInterval& q) {
  if (!(q.domain == dom)) throw DomainError("interval and data use different domains");
  if (q.length.sign() <= 0) throw DomainError("interval length must be positive");
  const ExactRational a = (dom.reduce(q.left) - dom.left()).mul_pow2(dom.finest);
  const ExactRational n = q.length.mul_pow2(dom.finest);
  if (!a.is_integer() || !n.is_integer()) throw DomainError("interval is not aligned to the mesh");
  if (dom.is_torus()) {
    if (q.length > ExactRational(1)) throw DomainError("torus arcs have length at most 1");
  } else if (q.left < dom.left() || q.right() > dom.right()) {
    throw DomainError("interval leaves the line window");
  }
  return {a.numerator().get_ui(), n.numerator().get_ui()};
}

double cell_sum(const std::vector<double>& v, std::size_t first, std::size_t count) {
  Accumulator acc;
  for (std::size_t t = 0; t < count; ++t) acc.add(v[(first + t) % v.size()]);
  return acc.value();
}

}  // namespace

double average(const MeshFunction1D& f, const ArbitraryInterval& q) {
  const auto [first, count] = aligned_cells(f.domain, q);
  return cell_sum(f.values, first, count) / static_cast<double>(count);
}

double weight_measure(const MeshWeight1D& w, const ArbitraryInterval& q) {
  const auto [first, count] = aligned_cells(w.domain, q);
  return std::ldexp(cell_sum(w.values, first, count), -w.domain.finest);
}

void for_each_interval(const Domain& domain, const DyadicValue& min_len,
                       const std::function<void(const ArbitraryInterval&)>& visit) {
  const ExactRational min_cells = min_len.to_rational().mul_pow2(domain.finest);
  if (min_cells < ExactRational(1)) throw DomainError("min_len must be at least the mesh cell length");
  const std::size_t n = domain.cells();
  const std::size_t m0 = min_cells.ceil().get_ui();
  const int lv = domain.finest;
  for (std::size_t s = 0; s < n; ++s) {
    const ExactRational left = domain.left() + ExactRational::dyadic(static_cast<long>(s), lv);
    const std::size_t longest = domain.is_torus() ? n - 1 : n - s;
    for (std::size_t m = m0; m <= longest; ++m) {
      visit(ArbitraryInterval{left, ExactRational::dyadic(static_cast<long>(m), lv), domain});
    }
    if (domain.is_torus() && s == 0 && n >= m0) visit(ArbitraryInterval{left, ExactRational(1), domain});
  }
}

std::vector<ArbitraryInterval> enumerate_intervals(const Domain& domain, const DyadicValue& min_len) {
  std::vector<ArbitraryInterval> out;
  for_each_interval(domain, min_len, [&](const ArbitraryInterval& q) { out.push_back(q); });
  return out;
}

double weight_integral(const MeshWeight1D& w, const ArbitraryInterval& q) {
  const Domain& dom = w.domain;
  if (!(q.domain == dom)) throw DomainError("interval and weight use different domains");
  if (q.length.sign() <= 0) throw DomainError("interval length must be positive");
  if (dom.is_torus() && q.length > ExactRational(1)) throw DomainError("torus arcs have length at most 1");
  if (!dom.is_torus() && (q.left < dom.left() || q.right() > dom.right())) {
    throw DomainError("interval leaves the line window");
  }
  const std::size_t n = dom.cells();
  const double h = std::ldexp(1.0, -dom.finest);
  // Position in cell units of both ends, the right one unrolled past the left.
  const ExactRational a = (dom.reduce(q.left) - dom.left()).mul_pow2(dom.finest);
  const ExactRational b = a + q.length.mul_pow2(dom.finest);
  const std::size_t i0 = a.floor().get_ui();
  const std::size_t i1 = b.floor().get_ui();
  const double fa = a.frac().to_double();
  const double fb = b.frac().to_double();
  if (i1 == i0) return w.values[i0 % n] * (fb - fa) * h;
  Accumulator acc;
  acc.add(w.values[i0 % n] * (1.0 - fa) * h);
  for (std::size_t i = i0 + 1; i < i1; ++i) acc.add(w.values[i % n] * h);
  if (fb > 0.0) acc.add(w.values[i1 % n] * fb * h);
  return acc.value();
}

ComparableAveragesReport comparable_averages_check(const MeshWeight1D& w, const Shift& shift,
                                                   const ArbitraryInterval& q, double doubling_constant) {
  const Cover c = cover(q, shift);
  const Interval iv = interval(c.id);
  const ArbitraryInterval big{iv.left, iv.length.to_rational(), w.domain};

  ComparableAveragesReport r;
  r.cover = c.id;
  r.avg_q = weight_integral(w, q) / q.length.to_double();
  r.avg_i = weight_integral(w, big) / big.length.to_double();
  const double big_c = shift.covering_value();
  r.upper_factor = big_c;
  r.lower_factor = std::pow(doubling_constant, -std::log2(4.0 * big_c));
  const double low = r.lower_factor * r.avg_i;
  const double high = r.upper_factor * r.avg_i;
  r.slack = std::min(relative_slack(low, r.avg_q), relative_slack(r.avg_q, high));
  r.pass = within(low, r.avg_q, false) && within(r.avg_q, high, false);
  return r;
}

}  // namespace dyadic
