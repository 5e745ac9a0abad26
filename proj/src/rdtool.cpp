#include "secseq/rdtool.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace secseq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2e = 1.4426950408889634;  // bits per nat
// Duality-gap termination (Blahut): the multiplicative growth factor of the
// output marginal bounds the remaining suboptimality, so the stop certifies
// accuracy even where plain iterate differences stall near the zero-rate
// knee of the curve. Convergence is slow only in a shrinking neighborhood
// of the critical slope, so sweep solves (bracket seeding) get a small
// budget and query solves a large one.
constexpr double kGapTol = 1e-13;
constexpr int kSweepIters = 2000;
constexpr int kQueryIters = 200000;
constexpr std::size_t kSweepPoints = 512;

struct BaPoint {
  double distortion = 0.0;
  double rate_bits = 0.0;
  std::vector<double> q;  // output marginal, warm-start carrier
};

// Alternating minimization at a fixed slope parameter lambda (nats per
// distortion unit). lambda < 0 selects the support-restricted minimum-rate
// channel at D = d_min (mask = argmin rows, flat weights).
BaPoint solve_at_slope(const SourceSpec& s, double lambda,
                       const std::vector<double>* warm, bool dmin_mask,
                       int max_iters) {
  const std::size_t nx = s.nx, ny = s.nxhat;
  std::vector<double> c(nx * ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    double row_min = kInf;
    for (std::size_t y = 0; y < ny; ++y) row_min = std::min(row_min, s.dist(x, y));
    for (std::size_t y = 0; y < ny; ++y) {
      const double dxy = s.dist(x, y);
      if (std::isinf(dxy)) continue;  // forbidden pair stays out of support
      if (dmin_mask)
        c[x * ny + y] = (dxy == row_min) ? 1.0 : 0.0;
      else
        c[x * ny + y] = std::exp(-lambda * dxy);
    }
  }

  std::vector<double> q(ny, 0.0);
  std::size_t feasible = 0;
  for (std::size_t y = 0; y < ny; ++y) {
    bool used = false;
    for (std::size_t x = 0; x < nx; ++x) used = used || c[x * ny + y] > 0.0;
    if (used) {
      q[y] = 1.0;
      ++feasible;
    }
  }
  for (double& w : q) w /= static_cast<double>(feasible);
  if (warm && warm->size() == ny) {
    // Blend, don't adopt: a warm start whose support collapsed at a nearby
    // slope would otherwise lock letters out of the optimization.
    for (std::size_t y = 0; y < ny; ++y)
      q[y] = 0.99 * (*warm)[y] + 0.01 * q[y];
  }

  std::vector<double> cond(nx * ny, 0.0), qn(ny, 0.0), growth(ny, 0.0);
  double rate = 0.0, dist = 0.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    std::fill(qn.begin(), qn.end(), 0.0);
    std::fill(growth.begin(), growth.end(), 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      double denom = 0.0;
      for (std::size_t y = 0; y < ny; ++y) denom += q[y] * c[x * ny + y];
      if (denom <= 0.0) {
        // Everything underflowed at this slope: pin to the row minimum.
        double row_min = kInf;
        std::size_t arg = 0;
        for (std::size_t y = 0; y < ny; ++y)
          if (s.dist(x, y) < row_min) {
            row_min = s.dist(x, y);
            arg = y;
          }
        for (std::size_t y = 0; y < ny; ++y) cond[x * ny + y] = 0.0;
        cond[x * ny + arg] = 1.0;
      } else {
        for (std::size_t y = 0; y < ny; ++y) {
          cond[x * ny + y] = q[y] * c[x * ny + y] / denom;
          growth[y] += s.px[x] * c[x * ny + y] / denom;
        }
      }
      for (std::size_t y = 0; y < ny; ++y)
        qn[y] += s.px[x] * cond[x * ny + y];
    }
    q.swap(qn);

    rate = 0.0;
    dist = 0.0;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        const double w = s.px[x] * cond[x * ny + y];
        if (w <= 0.0) continue;
        rate += w * std::log2(cond[x * ny + y] / q[y]);
        dist += w * s.dist(x, y);
      }
    const double max_growth = *std::max_element(growth.begin(), growth.end());
    if (max_growth - 1.0 < kGapTol) break;
  }
  return {dist, std::max(rate, 0.0), std::move(q)};
}

}  // namespace

SourceSpec::SourceSpec(Pmf px_in, std::vector<std::vector<double>> distortion)
    : px(std::move(px_in)) {
  nx = px.size();
  if (distortion.size() != nx)
    throw std::invalid_argument("SourceSpec: distortion rows != |X|");
  nxhat = distortion.front().size();
  if (nxhat == 0) throw std::invalid_argument("SourceSpec: empty distortion row");
  d.reserve(nx * nxhat);
  for (const auto& row : distortion) {
    if (row.size() != nxhat)
      throw std::invalid_argument("SourceSpec: ragged distortion matrix");
    bool finite = false;
    for (double x : row) {
      if (std::isnan(x) || x < 0.0)
        throw validation_error("SourceSpec: distortion entries must be >= 0");
      finite = finite || !std::isinf(x);
      d.push_back(x);
    }
    if (!finite)
      throw validation_error(
          "SourceSpec: a source letter has no finite reconstruction");
  }
  d_min_ = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    double m = kInf;
    for (std::size_t y = 0; y < nxhat; ++y) m = std::min(m, dist(x, y));
    d_min_ += px[x] * m;
  }
  d_max_ = kInf;
  for (std::size_t y = 0; y < nxhat; ++y) {
    double s = 0.0;
    for (std::size_t x = 0; x < nx; ++x)
      if (px[x] > 0.0) s += px[x] * dist(x, y);
    if (s < d_max_) {
      d_max_ = s;
      best_constant_ = y;
    }
  }
  if (std::isinf(d_max_))
    throw validation_error("SourceSpec: best constant reconstruction is infinite");
}

struct RateDistortionCurve::Sweep {
  std::vector<double> lambda;   // nats, increasing
  std::vector<BaPoint> points;  // distortion decreasing along lambda
  double max_rate = 0.0;        // R(d_min)
};

RateDistortionCurve::RateDistortionCurve(SourceSpec source)
    : s_(std::move(source)) {}

const RateDistortionCurve::Sweep& RateDistortionCurve::sweep() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!sweep_) {
    auto sw = std::make_shared<Sweep>();
    // Log-spaced slope sweep; warm starts make successive solves cheap.
    const double lo = 1e-6, hi = 1e6;
    const std::vector<double>* warm = nullptr;
    for (std::size_t i = 0; i < kSweepPoints; ++i) {
      const double t = static_cast<double>(i) / (kSweepPoints - 1);
      const double lam = lo * std::pow(hi / lo, t);
      BaPoint pt = solve_at_slope(s_, lam, warm, false, kSweepIters);
      sw->lambda.push_back(lam);
      sw->points.push_back(std::move(pt));
      warm = &sw->points.back().q;
    }
    sw->max_rate = solve_at_slope(s_, -1.0, nullptr, true, kQueryIters).rate_bits;
    sweep_ = std::move(sw);
  }
  return *sweep_;
}

double RateDistortionCurve::max_rate() const { return sweep().max_rate; }

std::vector<std::pair<double, double>> RateDistortionCurve::samples() const {
  const Sweep& sw = sweep();
  std::vector<std::pair<double, double>> out;
  out.reserve(sw.points.size() + 2);
  out.emplace_back(s_.d_min(), sw.max_rate);
  for (std::size_t i = sw.points.size(); i-- > 0;)
    out.emplace_back(sw.points[i].distortion, sw.points[i].rate_bits);
  out.emplace_back(s_.d_max(), 0.0);
  std::sort(out.begin(), out.end());
  return out;
}

double RateDistortionCurve::rate_at_distortion(double distortion) const {
  if (std::isnan(distortion))
    throw std::invalid_argument("rate_at_distortion: NaN distortion");
  if (distortion < s_.d_min() - 1e-12)
    throw feasibility_error("rate_at_distortion: distortion below d_min");
  if (distortion >= s_.d_max()) return 0.0;
  const Sweep& sw = sweep();
  if (distortion <= s_.d_min()) return sw.max_rate;

  // Bracket the target distortion on the lambda axis. D(lambda) decreases.
  double lam_lo = 0.0, lam_hi = sw.lambda.back();
  BaPoint hi_pt = sw.points.back();
  for (std::size_t i = 0; i < sw.points.size(); ++i) {
    if (sw.points[i].distortion <= distortion) {
      lam_hi = sw.lambda[i];
      hi_pt = sw.points[i];
      break;
    }
    lam_lo = sw.lambda[i];
  }
  if (hi_pt.distortion > distortion) {
    // Curve flattens before reaching the target; fall back to the max rate
    // (the remaining gap to d_min is below sweep resolution).
    return sw.max_rate;
  }
  BaPoint carry = hi_pt;
  BaPoint best = hi_pt;
  double best_lam = lam_hi;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lam_lo + lam_hi);
    BaPoint pt = solve_at_slope(s_, mid, carry.q.empty() ? nullptr : &carry.q,
                                false, kQueryIters);
    if (std::abs(pt.distortion - distortion) <
        std::abs(best.distortion - distortion)) {
      best = pt;
      best_lam = mid;
    }
    if (pt.distortion > distortion)
      lam_lo = mid;
    else
      lam_hi = mid;
    const bool done = std::abs(pt.distortion - distortion) < 1e-13;
    carry = std::move(pt);
    if (done) break;
  }
  // First-order tangent correction: dR/dD = -lambda (in bits).
  const double r = best.rate_bits +
                   best_lam * kLog2e * (best.distortion - distortion);
  return std::max(r, 0.0);
}

double RateDistortionCurve::distortion_at_rate(double rate) const {
  if (std::isnan(rate) || rate < 0.0)
    throw std::invalid_argument("distortion_at_rate: rate must be >= 0");
  if (rate <= 0.0) return s_.d_max();
  const Sweep& sw = sweep();
  if (rate >= sw.max_rate) return s_.d_min();

  // R(lambda) increases with lambda; bracket the target rate.
  double lam_lo = 0.0, lam_hi = sw.lambda.back();
  BaPoint hi_pt = sw.points.back();
  for (std::size_t i = 0; i < sw.points.size(); ++i) {
    if (sw.points[i].rate_bits >= rate) {
      lam_hi = sw.lambda[i];
      hi_pt = sw.points[i];
      break;
    }
    lam_lo = sw.lambda[i];
  }
  BaPoint carry = hi_pt;
  BaPoint best = hi_pt;
  double best_lam = lam_hi;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lam_lo + lam_hi);
    BaPoint pt = solve_at_slope(s_, mid, carry.q.empty() ? nullptr : &carry.q,
                                false, kQueryIters);
    if (std::abs(pt.rate_bits - rate) < std::abs(best.rate_bits - rate)) {
      best = pt;
      best_lam = mid;
    }
    if (pt.rate_bits < rate)
      lam_lo = mid;
    else
      lam_hi = mid;
    const bool done = std::abs(pt.rate_bits - rate) < 1e-13;
    carry = std::move(pt);
    if (done) break;
  }
  const double lam_bits = best_lam * kLog2e;
  double dd = best.distortion;
  if (lam_bits > 1e-12) dd += (best.rate_bits - rate) / lam_bits;
  return std::clamp(dd, s_.d_min(), s_.d_max());
}

double rate_at_distortion(const SourceSpec& s, double distortion) {
  return RateDistortionCurve(s).rate_at_distortion(distortion);
}

double distortion_at_rate(const SourceSpec& s, double rate) {
  return RateDistortionCurve(s).distortion_at_rate(rate);
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("binary_entropy: p outside [0,1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double closed_form_binary(double p, double distortion) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("closed_form_binary: p outside (0,1)");
  const double cap = std::min(p, 1.0 - p);
  if (!(distortion >= 0.0 && distortion <= cap))
    throw std::invalid_argument("closed_form_binary: D outside [0, min(p,1-p)]");
  return binary_entropy(p) - binary_entropy(distortion);
}

}  // namespace secseq
