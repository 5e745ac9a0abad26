#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "secseq/cumfn.hpp"
#include "secseq/rdtool.hpp"

namespace secseq {

enum class ProfileKind { kOuter, kInner, kDiscretized };

/// An effective cumulative rate profile: the raw pointwise maximum
/// max{c_low G(a), c_high G(a) - penalty}, its concave envelope, and the
/// penalty constant (the sup/max of c_diff G(b) - L(b)/ell over b).
struct EffectiveProfile {
  ProfileKind kind;
  CumulativeFn base_G;
  CumulativeFn base_L;
  double c_low = 0.0;   // C_WT for outer; C1 for inner
  double c_high = 0.0;  // C    for outer; C2 for inner
  double ell = 1.0;     // leakage slope (1 for outer/discretized)
  std::optional<std::size_t> k;  // set for the discretized kind
  CumulativeFn raw;
  PiecewiseLinearFn envelope;
  double penalty_constant = 0.0;
};

/// Outer-bound profile max{C_WT G, C G - sup_b((C - C_WT) G(b) - L(b))}.
/// The sup is evaluated exactly on the union of breakpoints of G and L,
/// testing both the right value and the left limit at each point.
EffectiveProfile effective_out(const CumulativeFn& G, const CumulativeFn& L,
                               double C, double C_WT);

/// Inner-bound profile: same shape with (C1, C2, L/ell). With parameters
/// (C_WT, C, 1) the output is bit-identical to effective_out.
EffectiveProfile effective_in(const CumulativeFn& G, const CumulativeFn& L,
                              double C1, double C2, double ell);

/// Finite-grid variant: the penalty maximizes over j/k, j = 0..k, only.
EffectiveProfile discretize_effective(const CumulativeFn& G,
                                      const CumulativeFn& L, double C,
                                      double C_WT, std::size_t k);

/// Distortion integral of the envelope: sum of length * D(slope) over the
/// envelope segments (exact for a piecewise-linear envelope).
double distortion_bound(const EffectiveProfile& profile,
                        const RateDistortionCurve& curve);

/// Integral of D over the slopes of an explicit polyline; used to compare
/// the envelope bound against the raw profile sampled on a grid.
double distortion_integral(const PiecewiseLinearFn& f,
                           const RateDistortionCurve& curve);

struct RateVector {
  std::vector<double> entries;  // bits per source symbol, k-scaled
  std::size_t k = 0;
};

/// Converse reshaping: sort descending and inflate the first entry so the
/// total hits target_total. Output prefix sums dominate the sorted input's;
/// throws feasibility_error when target_total < sum(entries).
RateVector reshape_rates(const RateVector& rt, double target_total);

/// Block bookkeeping of a (G, k, n) code: r_i = G(i/k) - G((i-1)/k) and
/// m_i = floor(n k r_i) + m_{i-1}.
struct BlockSchedule {
  std::size_t k = 0, n = 0;
  std::vector<double> r;
  std::vector<std::size_t> m;  // cumulative, size k+1 with m[0] = 0

  static BlockSchedule from_crdf(const CumulativeFn& G, std::size_t k,
                                 std::size_t n);
  std::size_t block_length(std::size_t i) const { return m[i + 1] - m[i]; }
  std::size_t total_length() const { return m.back(); }
};

/// One contiguous run of symbols emitted in some block: symbols
/// [first_symbol, first_symbol + count) produced by `source_block`.
struct EmissionSpan {
  std::size_t source_block = 0;
  std::size_t first_symbol = 0;
  std::size_t count = 0;
};

struct EmissionPlan {
  std::vector<std::vector<EmissionSpan>> per_block;
  std::vector<std::size_t> produced;  // symbols produced by each G1 block
  std::vector<std::size_t> budget;    // emission capacity of each G2 block
};

/// Rate-deferral plan: emits the symbols produced under G1 within the
/// budgets of G2, never earlier than their production block. Requires
/// G1 >= G2 on [0,1) and G1(1) == G2(1); with per-block floors the plan can
/// still run out of end capacity, which is reported as infeasible.
EmissionPlan defer_schedule(std::span<const double> rates_under_G1,
                            const CumulativeFn& G1, const CumulativeFn& G2,
                            std::size_t k, std::size_t n);

/// Per-block achievability rates derived from a profile: source-code rates
/// from envelope increments, effective rates from raw increments, channel
/// budgets from G, and channel rates R_i / r_i (bounded by c_high).
struct BlockRatePlan {
  std::vector<double> source_rates;     // envelope increments
  std::vector<double> effective_rates;  // raw increments
  std::vector<double> channel_budgets;  // r_i
  std::vector<double> channel_rates;    // effective_rates / r_i
};

BlockRatePlan block_rate_plan(const EffectiveProfile& profile,
                              const CumulativeFn& G, std::size_t k);

}  // namespace secseq
