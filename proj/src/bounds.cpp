#include "secseq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace secseq {

namespace {

void require_regular(const CumulativeFn& f, const char* name) {
  const auto rep = validate_regular(f);
  if (!rep.ok)
    throw validation_error(std::string(name) + " is not regular: " +
                           rep.property + " at alpha=" +
                           std::to_string(rep.location));
}

std::vector<double> breakpoint_union(const CumulativeFn& a,
                                     const CumulativeFn& b) {
  std::vector<double> u = a.breakpoints();
  u.insert(u.end(), b.breakpoints().begin(), b.breakpoints().end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

// sup over beta of c_diff G(beta) - L(beta) / ell, evaluated exactly on the
// union of breakpoints. Right values cover every interval of a pair of step
// functions; left limits additionally cover interval right ends when one
// side is continuous (linear G under a jumping L and vice versa).
double penalty_sup(const CumulativeFn& G, const CumulativeFn& L, double c_diff,
                   double ell, const std::vector<double>& betas) {
  double best = 0.0;  // beta = 0 always contributes 0
  for (double b : betas) {
    const double right = c_diff * G.eval(b) - L.eval(b) / ell;
    const double left = c_diff * G.eval_left(b) - L.eval_left(b) / ell;
    if (right > best) best = right;
    if (left > best) best = left;
  }
  return best;
}

// Raw profile value at one point. Written so the limiting cases are exact:
// with penalty == 0 the high branch wins everywhere and is emitted as
// c_high * G; otherwise the low branch plus the non-negative excess keeps
// raw == c_low * G bit-for-bit wherever the excess is clamped to zero.
double raw_value(double g, double c_low, double c_diff, double c_high,
                 double penalty) {
  if (penalty == 0.0) return c_high * g;
  return c_low * g + std::max(0.0, c_diff * g - penalty);
}

CumulativeFn build_raw(const CumulativeFn& G, double c_low, double c_diff,
                       double c_high, double penalty) {
  const auto& b = G.breakpoints();
  const auto& v = G.values();
  if (G.kind() == CumKind::kStep) {
    std::vector<double> rv(v.size());
    for (std::size_t j = 0; j < v.size(); ++j)
      rv[j] = raw_value(v[j], c_low, c_diff, c_high, penalty);
    return CumulativeFn::step(b, std::move(rv));
  }
  // Piecewise-linear G: the two branches cross where c_diff G == penalty;
  // insert that knot so raw stays piecewise-linear on its breakpoints.
  std::vector<double> nb, nv;
  nb.push_back(b[0]);
  nv.push_back(raw_value(v[0], c_low, c_diff, c_high, penalty));
  for (std::size_t j = 1; j < b.size(); ++j) {
    if (penalty > 0.0 && c_diff > 0.0) {
      const double s0 = c_diff * v[j - 1] - penalty;
      const double s1 = c_diff * v[j] - penalty;
      if (s0 < 0.0 && s1 > 0.0) {
        const double g_star = penalty / c_diff;
        const double t = (g_star - v[j - 1]) / (v[j] - v[j - 1]);
        const double a_star = b[j - 1] + t * (b[j] - b[j - 1]);
        if (a_star > nb.back() && a_star < b[j]) {
          nb.push_back(a_star);
          nv.push_back(raw_value(g_star, c_low, c_diff, c_high, penalty));
        }
      }
    }
    nb.push_back(b[j]);
    nv.push_back(raw_value(v[j], c_low, c_diff, c_high, penalty));
  }
  return CumulativeFn::piecewise_linear(std::move(nb), std::move(nv));
}

EffectiveProfile make_profile(ProfileKind kind, const CumulativeFn& G,
                              const CumulativeFn& L, double c_low,
                              double c_high, double ell,
                              std::optional<std::size_t> k, double penalty) {
  CumulativeFn raw =
      build_raw(G, c_low, c_high - c_low, c_high, penalty);
  PiecewiseLinearFn env = concave_envelope(raw);
  return EffectiveProfile{kind, G,   L,   c_low, c_high, ell,
                          k,    raw, env, penalty};
}

}  // namespace

EffectiveProfile effective_out(const CumulativeFn& G, const CumulativeFn& L,
                               double C, double C_WT) {
  if (!(C_WT >= 0.0 && C_WT <= C))
    throw std::invalid_argument("effective_out: need 0 <= C_WT <= C");
  require_regular(G, "G");
  require_regular(L, "L");
  if (std::isinf(G.total()))
    throw std::invalid_argument("effective_out: G must be bounded");
  const double penalty =
      penalty_sup(G, L, C - C_WT, 1.0, breakpoint_union(G, L));
  return make_profile(ProfileKind::kOuter, G, L, C_WT, C, 1.0, std::nullopt,
                      penalty);
}

EffectiveProfile effective_in(const CumulativeFn& G, const CumulativeFn& L,
                              double C1, double C2, double ell) {
  if (!(C1 < C2)) throw std::invalid_argument("effective_in: need C1 < C2");
  if (!(ell > 0.0)) throw std::invalid_argument("effective_in: need ell > 0");
  if (!(C1 >= 0.0)) throw std::invalid_argument("effective_in: need C1 >= 0");
  require_regular(G, "G");
  require_regular(L, "L");
  if (std::isinf(G.total()))
    throw std::invalid_argument("effective_in: G must be bounded");
  const double penalty =
      penalty_sup(G, L, C2 - C1, ell, breakpoint_union(G, L));
  return make_profile(ProfileKind::kInner, G, L, C1, C2, ell, std::nullopt,
                      penalty);
}

EffectiveProfile discretize_effective(const CumulativeFn& G,
                                      const CumulativeFn& L, double C,
                                      double C_WT, std::size_t k) {
  if (k == 0) throw std::invalid_argument("discretize_effective: k == 0");
  if (!(C_WT >= 0.0 && C_WT <= C))
    throw std::invalid_argument("discretize_effective: need 0 <= C_WT <= C");
  require_regular(G, "G");
  require_regular(L, "L");
  if (std::isinf(G.total()))
    throw std::invalid_argument("discretize_effective: G must be bounded");
  const double c_diff = C - C_WT;
  double penalty = 0.0;
  for (std::size_t j = 0; j <= k; ++j) {
    const double beta = static_cast<double>(j) / static_cast<double>(k);
    penalty = std::max(penalty, c_diff * G.eval(beta) - L.eval(beta));
  }
  return make_profile(ProfileKind::kDiscretized, G, L, C_WT, C, 1.0, k,
                      penalty);
}

double distortion_integral(const PiecewiseLinearFn& f,
                           const RateDistortionCurve& curve) {
  double total = 0.0;
  for (const Segment& seg : slopes(f))
    total += seg.length * curve.distortion_at_rate(std::max(seg.slope, 0.0));
  return total;
}

double distortion_bound(const EffectiveProfile& profile,
                        const RateDistortionCurve& curve) {
  return distortion_integral(profile.envelope, curve);
}

RateVector reshape_rates(const RateVector& rt, double target_total) {
  if (rt.entries.empty())
    throw std::invalid_argument("reshape_rates: empty rate vector");
  for (double r : rt.entries)
    if (!(r >= 0.0)) throw validation_error("reshape_rates: negative rate");
  double total = 0.0;
  for (double r : rt.entries) total += r;
  if (target_total < total - 1e-12 * std::max(1.0, total))
    throw feasibility_error("reshape_rates: target_total below current total");

  RateVector out;
  out.k = rt.k != 0 ? rt.k : rt.entries.size();
  out.entries = rt.entries;
  std::sort(out.entries.begin(), out.entries.end(), std::greater<double>());
  out.entries.front() += std::max(0.0, target_total - total);
  return out;
}

BlockSchedule BlockSchedule::from_crdf(const CumulativeFn& G, std::size_t k,
                                       std::size_t n) {
  if (k == 0 || n == 0)
    throw std::invalid_argument("BlockSchedule: k and n must be positive");
  BlockSchedule s;
  s.k = k;
  s.n = n;
  s.r = rates_from_crdf(G, k);
  s.m.assign(k + 1, 0);
  const double nk = static_cast<double>(n * k);
  for (std::size_t i = 0; i < k; ++i) {
    // floor with a hair of slack so budgets like 8 * 0.25 do not lose a
    // symbol to representation error
    const std::size_t li =
        static_cast<std::size_t>(std::floor(nk * s.r[i] + 1e-9));
    s.m[i + 1] = s.m[i] + li;
  }
  return s;
}

EmissionPlan defer_schedule(std::span<const double> rates_under_G1,
                            const CumulativeFn& G1, const CumulativeFn& G2,
                            std::size_t k, std::size_t n) {
  if (k == 0 || n == 0)
    throw std::invalid_argument("defer_schedule: k and n must be positive");
  if (rates_under_G1.size() != k)
    throw std::invalid_argument("defer_schedule: rates size != k");
  require_regular(G1, "G1");
  require_regular(G2, "G2");

  // Majorization precondition: G1 >= G2 on [0,1), equal at 1.
  for (double b : breakpoint_union(G1, G2)) {
    const bool right_ok = b >= 1.0 || G1.eval(b) >= G2.eval(b) - 1e-12;
    const bool left_ok = G1.eval_left(b) >= G2.eval_left(b) - 1e-12;
    if (!right_ok || !left_ok)
      throw validation_error("defer_schedule: G2 exceeds G1 at alpha=" +
                             std::to_string(b));
  }
  if (std::abs(G1.eval(1.0) - G2.eval(1.0)) > 1e-12)
    throw validation_error("defer_schedule: G1(1) != G2(1)");

  const double nk = static_cast<double>(n * k);
  EmissionPlan plan;
  plan.per_block.resize(k);
  plan.produced.resize(k);
  plan.budget.resize(k);
  const std::vector<double> r2 = rates_from_crdf(G2, k);
  for (std::size_t i = 0; i < k; ++i) {
    plan.produced[i] =
        static_cast<std::size_t>(std::floor(nk * rates_under_G1[i] + 1e-9));
    plan.budget[i] =
        static_cast<std::size_t>(std::floor(nk * r2[i] + 1e-9));
  }

  struct Pending {
    std::size_t block, offset, remaining;
  };
  std::deque<Pending> queue;
  for (std::size_t i = 0; i < k; ++i) {
    if (plan.produced[i] > 0) queue.push_back({i, 0, plan.produced[i]});
    std::size_t capacity = plan.budget[i];
    while (capacity > 0 && !queue.empty()) {
      Pending& front = queue.front();
      const std::size_t take = std::min(capacity, front.remaining);
      plan.per_block[i].push_back({front.block, front.offset, take});
      front.offset += take;
      front.remaining -= take;
      capacity -= take;
      if (front.remaining == 0) queue.pop_front();
    }
  }
  if (!queue.empty())
    throw feasibility_error(
        "defer_schedule: per-block floors leave symbols unemitted; "
        "increase n");
  return plan;
}

BlockRatePlan block_rate_plan(const EffectiveProfile& profile,
                              const CumulativeFn& G, std::size_t k) {
  if (k == 0) throw std::invalid_argument("block_rate_plan: k == 0");
  if (!profile.base_G.same_representation(G))
    throw std::invalid_argument(
        "block_rate_plan: profile was not computed from this G");
  BlockRatePlan plan;
  plan.source_rates.resize(k);
  plan.effective_rates.resize(k);
  plan.channel_budgets = rates_from_crdf(G, k);
  plan.channel_rates.resize(k);
  for (std::size_t i = 1; i <= k; ++i) {
    const double a1 = static_cast<double>(i) / static_cast<double>(k);
    const double a0 = static_cast<double>(i - 1) / static_cast<double>(k);
    plan.source_rates[i - 1] = profile.envelope(a1) - profile.envelope(a0);
    plan.effective_rates[i - 1] = profile.raw.eval(a1) - profile.raw.eval(a0);
    const double r = plan.channel_budgets[i - 1];
    const double R = plan.effective_rates[i - 1];
    if (r <= 0.0) {
      if (R > 1e-12)
        throw validation_error(
            "block_rate_plan: zero channel budget with positive rate at block " +
            std::to_string(i));
      plan.channel_rates[i - 1] = 0.0;
    } else {
      plan.channel_rates[i - 1] = R / r;
    }
  }
  return plan;
}

}  // namespace secseq
