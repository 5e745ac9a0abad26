#include "secseq/cumfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace secseq {

namespace {

void check_breakpoints(const std::vector<double>& b) {
  if (b.size() < 2 || b.front() != 0.0 || b.back() != 1.0)
    throw std::invalid_argument("breakpoints must run from 0 to 1");
  for (std::size_t i = 1; i < b.size(); ++i)
    if (!(b[i] > b[i - 1]))
      throw std::invalid_argument("breakpoints must be strictly increasing");
}

void check_alpha(double a) {
  if (!(a >= 0.0 && a <= 1.0))
    throw std::invalid_argument("alpha outside [0,1]");
}

}  // namespace

PiecewiseLinearFn::PiecewiseLinearFn(std::vector<double> alphas,
                                     std::vector<double> values)
    : a_(std::move(alphas)), v_(std::move(values)) {
  check_breakpoints(a_);
  if (v_.size() != a_.size())
    throw std::invalid_argument("PiecewiseLinearFn: knot count mismatch");
  for (double x : v_)
    if (std::isnan(x)) throw std::invalid_argument("PiecewiseLinearFn: NaN knot");
}

double PiecewiseLinearFn::operator()(double alpha) const {
  check_alpha(alpha);
  auto it = std::upper_bound(a_.begin(), a_.end(), alpha);
  if (it == a_.end()) return v_.back();  // alpha == 1
  const std::size_t j = static_cast<std::size_t>(it - a_.begin());
  if (j == 0) return v_.front();
  if (alpha == a_[j - 1]) return v_[j - 1];
  const double t = (alpha - a_[j - 1]) / (a_[j] - a_[j - 1]);
  return v_[j - 1] + t * (v_[j] - v_[j - 1]);
}

CumulativeFn::CumulativeFn(CumKind kind, std::vector<double> b,
                           std::vector<double> v, std::vector<double> jumps)
    : kind_(kind), b_(std::move(b)), v_(std::move(v)), jumps_(std::move(jumps)) {}

CumulativeFn CumulativeFn::step(std::vector<double> breakpoints,
                                std::vector<double> values) {
  check_breakpoints(breakpoints);
  if (values.size() != breakpoints.size())
    throw std::invalid_argument(
        "step function needs one level per interval plus the value at 1");
  std::vector<double> jumps(values.size());
  jumps[0] = values[0];
  for (std::size_t i = 1; i < values.size(); ++i)
    jumps[i] = values[i] - values[i - 1];
  return CumulativeFn(CumKind::kStep, std::move(breakpoints), std::move(values),
                      std::move(jumps));
}

CumulativeFn CumulativeFn::piecewise_linear(std::vector<double> breakpoints,
                                            std::vector<double> values) {
  check_breakpoints(breakpoints);
  if (values.size() != breakpoints.size())
    throw std::invalid_argument("piecewise_linear: knot count mismatch");
  return CumulativeFn(CumKind::kPiecewiseLinear, std::move(breakpoints),
                      std::move(values), {});
}

CumulativeFn CumulativeFn::from_rates(std::span<const double> rates) {
  if (rates.empty()) throw std::invalid_argument("from_rates: empty rates");
  const std::size_t k = rates.size();
  std::vector<double> b(k + 1), v(k + 1), jumps(k + 1);
  jumps[0] = 0.0;
  v[0] = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(rates[i] >= 0.0))
      throw validation_error("from_rates: negative rate");
    b[i] = static_cast<double>(i) / static_cast<double>(k);
    acc += rates[i];
    v[i + 1] = acc;
    jumps[i + 1] = rates[i];
  }
  b[k] = 1.0;
  // Level on [0, 1/k) is 0; the jump at i/k delivers rate r_i.
  return CumulativeFn(CumKind::kStep, std::move(b), std::move(v),
                      std::move(jumps));
}

CumulativeFn CumulativeFn::zero() {
  return CumulativeFn::step({0.0, 1.0}, {0.0, 0.0});
}

const std::vector<double>& CumulativeFn::jumps() const {
  if (kind_ != CumKind::kStep)
    throw std::invalid_argument("jumps(): step kind only");
  return jumps_;
}

double CumulativeFn::eval(double alpha) const {
  check_alpha(alpha);
  if (kind_ == CumKind::kPiecewiseLinear) {
    return PiecewiseLinearFn(b_, v_)(alpha);
  }
  auto it = std::upper_bound(b_.begin(), b_.end(), alpha);
  if (it == b_.end()) return v_.back();  // alpha == 1
  const std::size_t j = static_cast<std::size_t>(it - b_.begin());
  return v_[j - 1];
}

double CumulativeFn::eval_left(double alpha) const {
  check_alpha(alpha);
  if (alpha == 0.0) return eval(0.0);
  if (kind_ == CumKind::kPiecewiseLinear) return eval(alpha);
  // Greatest breakpoint strictly below alpha indexes the previous interval.
  auto it = std::lower_bound(b_.begin(), b_.end(), alpha);
  if (it == b_.end() || *it != alpha) return eval(alpha);  // not a jump point
  const std::size_t j = static_cast<std::size_t>(it - b_.begin());
  return v_[j - 1];
}

bool CumulativeFn::same_representation(const CumulativeFn& other) const {
  return kind_ == other.kind_ && b_ == other.b_ && v_ == other.v_;
}

RegularityReport validate_regular(const CumulativeFn& f) {
  RegularityReport rep;
  const auto& v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::isnan(v[i]) || v[i] < 0.0) {
      rep.ok = false;
      rep.property = "non-negative";
      rep.location = f.breakpoints()[i];
      rep.message = "value is negative or NaN";
      return rep;
    }
  }
  if (v.front() != 0.0) {
    rep.ok = false;
    rep.property = "zero initial value";
    rep.location = 0.0;
    rep.message = "F(0) must equal 0";
    return rep;
  }
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) {
      rep.ok = false;
      rep.property = "non-decreasing";
      rep.location = f.breakpoints()[i];
      rep.message = "value decreases at breakpoint";
      return rep;
    }
  }
  // Right-continuity holds by representation: step levels are right values.
  return rep;
}

CumulativeFn step_from_rates(std::span<const double> rates) {
  return CumulativeFn::from_rates(rates);
}

std::vector<double> rates_from_crdf(const CumulativeFn& g, std::size_t k) {
  if (k == 0) throw std::invalid_argument("rates_from_crdf: k == 0");
  const auto rep = validate_regular(g);
  if (!rep.ok)
    throw validation_error("rates_from_crdf: input not regular (" +
                           rep.property + ")");
  std::vector<double> grid(k + 1);
  for (std::size_t i = 0; i <= k; ++i)
    grid[i] = static_cast<double>(i) / static_cast<double>(k);

  std::vector<double> r(k, 0.0);
  if (g.kind() == CumKind::kStep) {
    // r_i collects the jump sizes in ((i-1)/k, i/k]; summing the stored
    // jumps avoids the rounding of level differences.
    const auto& b = g.breakpoints();
    const auto& jumps = g.jumps();
    for (std::size_t j = 1; j < b.size(); ++j) {
      if (jumps[j] == 0.0) continue;
      std::size_t cell =
          static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), b[j]) -
                                   grid.begin());
      // grid[cell] >= b[j] > grid[cell-1]; jump at i/k belongs to r_i.
      r[cell - 1] += jumps[j];
    }
  } else {
    for (std::size_t i = 1; i <= k; ++i)
      r[i - 1] = g.eval(grid[i]) - g.eval(grid[i - 1]);
  }
  return r;
}

namespace {

struct Pt {
  double x, y;
};

double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

PiecewiseLinearFn upper_hull(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) {
    return a.x < b.x || (a.x == b.x && a.y > b.y);
  });
  // Equal alphas: keep only the larger value (sorted first).
  std::vector<Pt> uniq;
  for (const Pt& p : pts) {
    if (std::isinf(p.y))
      throw std::invalid_argument("concave_envelope: unbounded input");
    if (!uniq.empty() && uniq.back().x == p.x) continue;
    uniq.push_back(p);
  }
  std::vector<Pt> hull;
  for (const Pt& p : uniq) {
    while (hull.size() >= 2 &&
           cross(hull[hull.size() - 2], hull[hull.size() - 1], p) >= 0.0)
      hull.pop_back();
    hull.push_back(p);
  }
  std::vector<double> a, v;
  a.reserve(hull.size());
  v.reserve(hull.size());
  for (const Pt& p : hull) {
    a.push_back(p.x);
    v.push_back(p.y);
  }
  return PiecewiseLinearFn(std::move(a), std::move(v));
}

}  // namespace

PiecewiseLinearFn concave_envelope(const CumulativeFn& f) {
  std::vector<Pt> pts;
  const auto& b = f.breakpoints();
  const auto& v = f.values();
  if (f.kind() == CumKind::kStep) {
    pts.push_back({b[0], v[0]});
    for (std::size_t j = 1; j < b.size(); ++j) {
      pts.push_back({b[j], v[j - 1]});  // left limit
      pts.push_back({b[j], v[j]});      // jump top
    }
  } else {
    for (std::size_t j = 0; j < b.size(); ++j) pts.push_back({b[j], v[j]});
  }
  return upper_hull(std::move(pts));
}

PiecewiseLinearFn concave_envelope(const PiecewiseLinearFn& f) {
  std::vector<Pt> pts;
  for (std::size_t j = 0; j < f.knot_count(); ++j)
    pts.push_back({f.alphas()[j], f.values()[j]});
  return upper_hull(std::move(pts));
}

std::vector<Segment> slopes(const PiecewiseLinearFn& f) {
  std::vector<Segment> out;
  out.reserve(f.knot_count() - 1);
  for (std::size_t j = 1; j < f.knot_count(); ++j) {
    const double len = f.alphas()[j] - f.alphas()[j - 1];
    out.push_back({len, (f.values()[j] - f.values()[j - 1]) / len});
  }
  return out;
}

}  // namespace secseq
