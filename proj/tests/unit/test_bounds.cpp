#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "helpers.hpp"
#include "secseq/bounds.hpp"

using namespace secseq;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::vector<double>> kHamming2{{0.0, 1.0}, {1.0, 0.0}};

CumulativeFn zero_L() { return CumulativeFn::step({0.0, 1.0}, {0.0, 0.0}); }

// Effectively unlimited leakage budget. For a step G the budget jumps to
// infinity below G's first jump (a regular L must still start at 0); for a
// continuous G a steep linear budget outruns any bounded profile.
CumulativeFn unbounded_L(const CumulativeFn& g) {
  if (g.kind() == CumKind::kStep) {
    const double t = g.breakpoints()[1] * 0.5;
    return CumulativeFn::step({0.0, t, 1.0}, {0.0, kInf, kInf});
  }
  return CumulativeFn::piecewise_linear({0.0, 1.0}, {0.0, 1e12});
}

// Brute-force sup over a dense beta grid; a lower bound on the true sup,
// tight for continuous inputs.
double grid_penalty(const CumulativeFn& g, const CumulativeFn& l, double c_diff,
                    double ell, int points = 10000) {
  double best = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double b = static_cast<double>(i) / points;
    const double term = c_diff * g.eval(b) - l.eval(b) / ell;
    if (term > best) best = term;
  }
  return best;
}

}  // namespace

TEST_CASE("outer profile, unbounded leakage budget") {
  const auto g = CumulativeFn::step({0.0, 0.3, 1.0}, {0.0, 0.4, 0.9});
  const auto l = unbounded_L(g);
  const auto prof = effective_out(g, l, 0.8, 0.2);
  CHECK(prof.penalty_constant == 0.0);
  for (std::size_t j = 0; j < g.values().size(); ++j)
    CHECK(prof.raw.values()[j] == 0.8 * g.values()[j]);
}

TEST_CASE("outer profile, zero leakage budget") {
  const auto g = CumulativeFn::step({0.0, 0.3, 0.7, 1.0}, {0.0, 0.4, 0.7, 0.9});
  const auto prof = effective_out(g, zero_L(), 0.8, 0.2);
  CHECK(prof.penalty_constant == (0.8 - 0.2) * 0.9);
  for (std::size_t j = 0; j < g.values().size(); ++j)
    CHECK(prof.raw.values()[j] == 0.2 * g.values()[j]);
}

TEST_CASE("outer profile, proportional leakage budget") {
  // G(a) = a, L(a) = a/4, C = 1, C_WT = 1/4: penalty 1/2, breakeven at 2/3.
  const auto g = CumulativeFn::piecewise_linear({0.0, 1.0}, {0.0, 1.0});
  const auto l = CumulativeFn::piecewise_linear({0.0, 1.0}, {0.0, 0.25});
  const auto prof = effective_out(g, l, 1.0, 0.25);
  CHECK(std::abs(prof.penalty_constant - 0.5) < 1e-15);
  CHECK(std::abs(prof.penalty_constant - grid_penalty(g, l, 0.75, 1.0)) < 1e-12);
  for (double a : {0.0, 0.25, 0.5, 2.0 / 3.0, 0.75, 1.0}) {
    const double expect = std::max(0.25 * a, a - 0.5);
    CHECK(std::abs(prof.raw.eval(a) - expect) < 1e-15);
  }
  // The branch crossing appears as a knot.
  bool has_breakeven = false;
  for (double b : prof.raw.breakpoints())
    has_breakeven = has_breakeven || std::abs(b - 2.0 / 3.0) < 1e-12;
  CHECK(has_breakeven);
}

TEST_CASE("inner profile coincides with outer at (C_WT, C, 1)") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<std::size_t> jumps(1, 7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testutil::random_step(rng, jumps(rng));
    const auto l = testutil::random_step(rng, jumps(rng), 0.5);
    const double c = 0.2 + unif(rng);
    const double cwt = unif(rng) * c;
    const auto outer = effective_out(g, l, c, cwt);
    const auto inner = effective_in(g, l, cwt, c, 1.0);
    CHECK(inner.penalty_constant == outer.penalty_constant);
    REQUIRE(inner.raw.values().size() == outer.raw.values().size());
    for (std::size_t j = 0; j < inner.raw.values().size(); ++j)
      CHECK(inner.raw.values()[j] == outer.raw.values()[j]);
  }
}

TEST_CASE("inner profile, halved leakage budget") {
  const auto g = CumulativeFn::piecewise_linear({0.0, 1.0}, {0.0, 1.0});
  const auto l = CumulativeFn::piecewise_linear({0.0, 1.0}, {0.0, 0.25});
  const auto prof = effective_in(g, l, 0.25, 1.0, 2.0);
  CHECK(std::abs(prof.penalty_constant - 0.625) < 1e-15);
  CHECK(std::abs(prof.penalty_constant - grid_penalty(g, l, 0.75, 2.0)) < 1e-12);
}

TEST_CASE("inner profile, zero budget at any slope") {
  const auto g = CumulativeFn::step({0.0, 0.5, 1.0}, {0.0, 0.5, 1.0});
  for (double ell : {0.5, 1.0, 3.0}) {
    const auto prof = effective_in(g, zero_L(), 0.3, 0.9, ell);
    for (std::size_t j = 0; j < g.values().size(); ++j)
      CHECK(prof.raw.values()[j] == 0.3 * g.values()[j]);
  }
}

TEST_CASE("profile parameter validation") {
  const auto g = CumulativeFn::piecewise_linear({0.0, 1.0}, {0.0, 1.0});
  CHECK_THROWS_AS(effective_out(g, zero_L(), 0.5, 0.6), std::invalid_argument);
  CHECK_THROWS_AS(effective_in(g, zero_L(), 0.5, 0.5, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(effective_in(g, zero_L(), 0.2, 0.5, 0.0),
                  std::invalid_argument);
  const auto bad = CumulativeFn::step({0.0, 1.0}, {0.2, 0.4});
  CHECK_THROWS_AS(effective_out(bad, zero_L(), 1.0, 0.5), validation_error);
}

TEST_CASE("discretized penalty on the j/k grid") {
  // k = 1 with (C - C_WT) G(1) <= L(1): nothing to pay.
  const auto g = CumulativeFn::piecewise_linear({0.0, 1.0}, {0.0, 1.0});
  const auto l_big = CumulativeFn::piecewise_linear({0.0, 1.0}, {0.0, 0.6});
  const auto k1 = discretize_effective(g, l_big, 0.75, 0.25, 1);
  CHECK(k1.penalty_constant == 0.0);

  // Three-point evaluation by hand: max{0, 0.25, 0.5} = 0.5.
  const auto l = CumulativeFn::piecewise_linear({0.0, 1.0}, {0.0, 0.25});
  const auto k2 = discretize_effective(g, l, 1.0, 0.25, 2);
  CHECK(std::abs(k2.penalty_constant - 0.5) < 1e-15);

  // Brute force over the grid matches the reported constant.
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const auto gs = testutil::random_step(rng, 4);
    const auto ls = testutil::random_step(rng, 3, 0.4);
    const std::size_t k = 1 + trial % 6;
    const auto prof = discretize_effective(gs, ls, 1.0, 0.3, k);
    double brute = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
      const double beta = static_cast<double>(j) / static_cast<double>(k);
      brute = std::max(brute, 0.7 * gs.eval(beta) - ls.eval(beta));
    }
    CHECK(prof.penalty_constant == brute);
    // Grid max never exceeds the continuum sup.
    const auto cont = effective_out(gs, ls, 1.0, 0.3);
    CHECK(prof.penalty_constant <= cont.penalty_constant + 1e-15);
    // Smaller penalty means a pointwise-larger profile.
    for (double b : gs.breakpoints())
      CHECK(prof.raw.eval(b) >= cont.raw.eval(b) - 1e-12);
  }
}

TEST_CASE("discretized equals continuum when breakpoints sit on the grid") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + trial % 5;
    std::vector<double> gv(k + 1, 0.0), lv(k + 1, 0.0), b(k + 1);
    for (std::size_t i = 0; i <= k; ++i)
      b[i] = static_cast<double>(i) / static_cast<double>(k);
    for (std::size_t i = 1; i <= k; ++i) {
      gv[i] = gv[i - 1] + unif(rng);
      lv[i] = lv[i - 1] + 0.3 * unif(rng);
    }
    const auto g = CumulativeFn::step(b, gv);
    const auto l = CumulativeFn::step(b, lv);
    const auto disc = discretize_effective(g, l, 1.0, 0.4, k);
    const auto cont = effective_out(g, l, 1.0, 0.4);
    CHECK(disc.penalty_constant == cont.penalty_constant);
    for (std::size_t j = 0; j < g.values().size(); ++j)
      CHECK(disc.raw.values()[j] == cont.raw.values()[j]);
  }
}

TEST_CASE("discretized endpoint identity") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = testutil::random_step(rng, 5);
    const auto l = testutil::random_step(rng, 4, 0.5);
    const auto prof = discretize_effective(g, l, 0.9, 0.35, 3);
    CHECK(std::abs(prof.raw.eval(1.0) -
                   (0.9 * g.eval(1.0) - prof.penalty_constant)) < 1e-12);
    CHECK(prof.raw.eval(1.0) >= 0.35 * g.eval(1.0) - 1e-12);
  }
}

TEST_CASE("sandwich between the two branches") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testutil::random_step(rng, 5);
    const auto l = testutil::random_step(rng, 5, 0.6);
    const auto prof = effective_out(g, l, 1.0, 0.3);
    for (double b : g.breakpoints()) {
      CHECK(prof.raw.eval(b) >= 0.3 * g.eval(b));  // exact by construction
      CHECK(prof.raw.eval(b) <= 1.0 * g.eval(b) + 1e-12);
    }
    CHECK(prof.raw.eval(0.0) == 0.0);
    // The hull keeps (1, raw(1)) as its last vertex.
    CHECK(prof.envelope(1.0) == prof.raw.eval(1.0));
  }
}

TEST_CASE("outer dominates inner for nested parameters") {
  // Domination needs C1 <= C_WT, C2 <= C, ell >= 1 and additionally
  // C2 - C1 >= C - C_WT; without the gap condition the raw profiles can
  // cross mid-interval even though the envelopes stay ordered.
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testutil::random_step(rng, 4);
    const auto l = testutil::random_step(rng, 4, 0.5);
    const double c = 0.5 + unif(rng);
    const double cwt = c * (0.5 + 0.5 * unif(rng));
    const double c1 = cwt * unif(rng) * 0.99;
    const double c2 = c - (cwt - c1) * unif(rng);
    const double ell = 1.0 + 2.0 * unif(rng);
    REQUIRE(c2 - c1 >= c - cwt - 1e-12);
    const auto outer = effective_out(g, l, c, cwt);
    const auto inner = effective_in(g, l, c1, c2, ell);
    for (double b : g.breakpoints())
      CHECK(outer.raw.eval(b) >= inner.raw.eval(b) - 1e-9);
  }
}

TEST_CASE("distortion bound of simple envelopes") {
  SourceSpec fair(Pmf({0.5, 0.5}), kHamming2);
  RateDistortionCurve curve(fair);

  // Constant slope 0.5 over [0,1]: the bound is D(0.5) = h^{-1}(0.5).
  const auto g1 = CumulativeFn::piecewise_linear({0.0, 1.0}, {0.0, 0.5});
  const auto p1 = effective_out(g1, unbounded_L(g1), 1.0, 0.3);
  CHECK(std::abs(distortion_bound(p1, curve) - 0.110028) < 1e-4);

  // No rate at all: the best constant guess errs half the time.
  const auto p0 = effective_out(CumulativeFn::zero(), zero_L(), 1.0, 0.3);
  CHECK(distortion_bound(p0, curve) == doctest::Approx(0.5).epsilon(1e-12));

  // Two segments: 0.5 * D(2.0) + 0.5 * D(0.0) = 0 + 0.25.
  const auto gstep = CumulativeFn::step({0.0, 0.5, 1.0}, {0.0, 1.0, 1.0});
  const auto p2 = effective_out(gstep, unbounded_L(gstep), 1.0, 0.3);
  CHECK(std::abs(distortion_bound(p2, curve) - 0.25) < 1e-9);
}

TEST_CASE("envelope integral never exceeds the grid polyline integral") {
  SourceSpec fair(Pmf({0.5, 0.5}), kHamming2);
  RateDistortionCurve curve(fair);
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 25; ++trial) {
    const auto g = testutil::random_step(rng, 5);
    const auto l = testutil::random_step(rng, 4, 0.4);
    const auto prof = effective_out(g, l, 1.0, 0.4);
    std::vector<double> vals;
    for (double b : prof.raw.breakpoints()) vals.push_back(prof.raw.eval(b));
    const PiecewiseLinearFn polyline(prof.raw.breakpoints(), vals);
    CHECK(distortion_bound(prof, curve) <=
          distortion_integral(polyline, curve) + 1e-9);
  }
}

TEST_CASE("reshape examples") {
  RateVector in;
  in.entries = {0.2, 0.5, 0.3};
  in.k = 3;
  const auto out = reshape_rates(in, 1.2);
  CHECK(out.entries == std::vector<double>{0.7, 0.3, 0.2});

  RateVector sorted;
  sorted.entries = {0.5, 0.3, 0.2};
  sorted.k = 3;
  const auto same = reshape_rates(sorted, 1.0);
  CHECK(same.entries == sorted.entries);

  RateVector zeros;
  zeros.entries = {0.0, 0.0};
  zeros.k = 2;
  const auto inflated = reshape_rates(zeros, 1.0);
  CHECK(inflated.entries == std::vector<double>{1.0, 0.0});

  CHECK_THROWS_AS(reshape_rates(sorted, 0.9), feasibility_error);
}

TEST_CASE("reshape property suite") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> kd(1, 10);
  const auto probe = [](double x) { return std::max(0.0, 1.0 - x); };
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = kd(rng);
    RateVector in;
    in.k = k;
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      in.entries.push_back(unif(rng));
      total += in.entries.back();
    }
    const double target = total + unif(rng);
    const auto out = reshape_rates(in, target);

    // Non-increasing.
    for (std::size_t i = 1; i < k; ++i)
      CHECK(out.entries[i] <= out.entries[i - 1]);
    // Total preserved.
    double out_total = 0.0;
    for (double r : out.entries) out_total += r;
    CHECK(std::abs(out_total - target) < 1e-12);
    // Prefix sums dominate the sorted input's.
    auto sorted = in.entries;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double ps_out = 0.0, ps_in = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      ps_out += out.entries[i];
      ps_in += sorted[i];
      CHECK(ps_out >= ps_in - 1e-12);
    }
    // A non-increasing probe never sees worse rates.
    double probe_out = 0.0, probe_in = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      probe_out += probe(static_cast<double>(k) * out.entries[i]);
      probe_in += probe(static_cast<double>(k) * sorted[i]);
    }
    CHECK(probe_out <= probe_in + 1e-12);
  }
}

TEST_CASE("defer schedule plans") {
  // Identical profiles: everything emitted in place.
  const auto g = step_from_rates(std::vector<double>{0.5, 0.5});
  const auto plan = defer_schedule(std::vector<double>{0.5, 0.5}, g, g, 2, 4);
  REQUIRE(plan.per_block[0].size() == 1);
  CHECK(plan.per_block[0][0].source_block == 0);
  CHECK(plan.per_block[0][0].count == 4);
  CHECK(plan.per_block[1][0].source_block == 1);

  // Front-loaded G1 against a uniform G2 with nk = 8: half deferred.
  const auto g1 = step_from_rates(std::vector<double>{1.0, 0.0});
  const auto g2 = step_from_rates(std::vector<double>{0.5, 0.5});
  const auto half = defer_schedule(std::vector<double>{1.0, 0.0}, g1, g2, 2, 4);
  REQUIRE(half.per_block[0].size() == 1);
  CHECK(half.per_block[0][0].count == 4);
  REQUIRE(half.per_block[1].size() == 1);
  CHECK(half.per_block[1][0].source_block == 0);
  CHECK(half.per_block[1][0].first_symbol == 4);
  CHECK(half.per_block[1][0].count == 4);

  // Zero first-block budget defers everything.
  const auto g3 = step_from_rates(std::vector<double>{0.0, 1.0});
  const auto all = defer_schedule(std::vector<double>{1.0, 0.0}, g1, g3, 2, 4);
  CHECK(all.per_block[0].empty());
  REQUIRE_FALSE(all.per_block[1].empty());
  CHECK(all.per_block[1][0].source_block == 0);

  // Violated majorization is reported with its location.
  CHECK_THROWS_AS(defer_schedule(std::vector<double>{0.5, 0.5}, g2, g1, 2, 4),
                  validation_error);

  // Per-block floors can starve the receiving profile at small n even when
  // the majorization holds: (1.0, 0.9) produces 10+9 symbols but
  // (0.95, 0.95) only budgets 9+9.
  const auto g4 = step_from_rates(std::vector<double>{1.0, 0.9});
  const auto g5 = step_from_rates(std::vector<double>{0.95, 0.95});
  CHECK_THROWS_AS(defer_schedule(std::vector<double>{1.0, 0.9}, g4, g5, 2, 5),
                  feasibility_error);
}

TEST_CASE("block rate plan on a linear profile") {
  const auto g = CumulativeFn::piecewise_linear({0.0, 1.0}, {0.0, 1.0});
  const auto prof = effective_in(g, zero_L(), 0.3, 0.8, 1.0);
  const auto plan = block_rate_plan(prof, g, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(plan.effective_rates[i] == doctest::Approx(0.075).epsilon(1e-12));
    CHECK(plan.channel_budgets[i] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(plan.channel_rates[i] == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(plan.channel_rates[i] <= 0.8 + 1e-9);
  }
}

TEST_CASE("block rate plan respects the channel cap") {
  // Inner profile with the halved budget: penalty 0.625, so the raw profile
  // is max{a/4, a - 0.625} with raw(1) = 0.375 and the envelope the chord
  // 0.375 a. Per-block numbers on the k = 3 grid follow by hand.
  const auto g = CumulativeFn::piecewise_linear({0.0, 1.0}, {0.0, 1.0});
  const auto l = CumulativeFn::piecewise_linear({0.0, 1.0}, {0.0, 0.25});
  const auto prof = effective_in(g, l, 0.25, 1.0, 2.0);
  const auto plan = block_rate_plan(prof, g, 3);
  double source_total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(plan.channel_rates[i] <= 1.0 + 1e-9);
    CHECK(plan.source_rates[i] == doctest::Approx(0.125).epsilon(1e-12));
    source_total += plan.source_rates[i];
  }
  CHECK(plan.effective_rates[0] == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(plan.effective_rates[1] == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(plan.effective_rates[2] == doctest::Approx(5.0 / 24).epsilon(1e-12));
  CHECK(plan.channel_rates[2] == doctest::Approx(0.625).epsilon(1e-9));
  CHECK(std::abs(source_total - prof.envelope(1.0)) < 1e-12);

  // All-zero budget is consistent only with an all-zero profile.
  const auto gz = CumulativeFn::zero();
  const auto pz = effective_out(gz, zero_L(), 1.0, 0.5);
  const auto zplan = block_rate_plan(pz, gz, 2);
  for (double r : zplan.channel_rates) CHECK(r == 0.0);

  CHECK_THROWS_AS(block_rate_plan(prof, gz, 3), std::invalid_argument);
}

TEST_CASE("random block plans never exceed c_high per block") {
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testutil::random_step(rng, 4);
    const auto l = testutil::random_step(rng, 3, 0.5);
    const double c2 = 0.4 + unif(rng);
    const double c1 = c2 * unif(rng) * 0.9;
    const auto prof = effective_in(g, l, c1, c2, 0.5 + unif(rng));
    const auto plan = block_rate_plan(prof, g, 4);
    for (double rbar : plan.channel_rates) CHECK(rbar <= c2 + 1e-9);
  }
}
