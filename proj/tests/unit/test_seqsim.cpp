#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "secseq/rdtool.hpp"
#include "secseq/seqsim.hpp"

using namespace secseq;

namespace {

const std::vector<std::vector<double>> kHamming2{{0.0, 1.0}, {1.0, 0.0}};

// Degenerate eavesdropper: sees a constant symbol whatever is sent.
WiretapKernel blind_kernel(const Dmc& main) {
  return WiretapKernel::independent_eaves(main, Pmf({1.0}));
}

SequentialCode identity_code_k1n2() {
  SequentialCode code;
  code.k = 1;
  code.n = 2;
  code.x_size = code.u_size = code.v_size = code.xhat_size = 2;
  const auto g = step_from_rates(std::vector<double>{1.0});
  code.schedule = BlockSchedule::from_crdf(g, 1, 2);
  code.encoders = {{0, 1, 2, 3}};
  code.decoder = {0, 1, 2, 3};
  return code;
}

}  // namespace

TEST_CASE("noiseless identity code leaks nothing to a blind eavesdropper") {
  const auto code = identity_code_k1n2();
  const SourceSpec source(Pmf({0.5, 0.5}), kHamming2);
  const auto w = blind_kernel(Dmc::identity(2));
  const auto g = step_from_rates(std::vector<double>{1.0});
  const auto report = run_exact(code, source, w, g, CumulativeFn::zero(), 0.0);
  CHECK(report.expected_distortion == 0.0);
  REQUIRE(report.leakage.size() == 1);
  CHECK(report.leakage[0] == 0.0);
  CHECK(report.violations.empty());
}

TEST_CASE("copy eavesdropper on one fair bit is flagged with margin one") {
  SequentialCode code;
  code.k = 1;
  code.n = 1;
  code.x_size = code.u_size = code.v_size = code.xhat_size = 2;
  const auto g = step_from_rates(std::vector<double>{1.0});
  code.schedule = BlockSchedule::from_crdf(g, 1, 1);
  code.encoders = {{0, 1}};
  code.decoder = {0, 1};
  const SourceSpec source(Pmf({0.5, 0.5}), kHamming2);
  const auto w = WiretapKernel::copy_eaves(Dmc::identity(2));
  const auto report = run_exact(code, source, w, g, CumulativeFn::zero(), 1.0);
  CHECK(report.expected_distortion == 0.0);
  REQUIRE(report.leakage.size() == 1);
  CHECK(report.leakage[0] == 1.0);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].constraint == "leakage");
  CHECK(report.violations[0].block == 1);
  CHECK(report.violations[0].margin == 1.0);
}

TEST_CASE("two-block pairwise-AND code, exact distortion and leakage") {
  // Block 1 sends nothing; block 2 sends (x1 AND x2, x3 AND x4) through a
  // noiseless main channel while the eavesdropper sees BSC(0.3) of it.
  SequentialCode code;
  code.k = 2;
  code.n = 2;
  code.x_size = code.u_size = code.v_size = code.xhat_size = 2;
  const auto g = step_from_rates(std::vector<double>{0.0, 0.5});
  code.schedule = BlockSchedule::from_crdf(g, 2, 2);
  REQUIRE(code.schedule.m == std::vector<std::size_t>{0, 0, 2});
  code.encoders.resize(2);
  code.encoders[0].assign(4, 0);  // zero budget, nothing to say
  code.encoders[1].resize(16);
  for (std::size_t x = 0; x < 16; ++x) {
    const std::size_t x1 = (x >> 3) & 1, x2 = (x >> 2) & 1;
    const std::size_t x3 = (x >> 1) & 1, x4 = x & 1;
    code.encoders[1][x] =
        static_cast<std::uint32_t>(((x1 & x2) << 1) | (x3 & x4));
  }
  code.decoder.resize(4);
  for (std::size_t v = 0; v < 4; ++v) {
    const std::size_t v1 = (v >> 1) & 1, v2 = v & 1;
    code.decoder[v] = static_cast<std::uint32_t>(12 * v1 + 3 * v2);
  }

  const SourceSpec source(Pmf({0.5, 0.5}), kHamming2);
  const auto w = WiretapKernel::degraded(Dmc::identity(2), Dmc::bsc(0.3));
  const auto big_L = CumulativeFn::step({0.0, 1.0}, {0.0, 1.0});
  const auto report = run_exact(code, source, w, g, big_L, 0.3);

  // Per pair: (0,0) and (1,1) reconstruct exactly, mixed pairs err on one
  // of two symbols, so E d = 2/4 * 1/2 * 1/2 ... = 0.25 overall.
  CHECK(std::abs(report.expected_distortion - 0.25) < 1e-12);
  REQUIRE(report.leakage.size() == 2);
  CHECK(report.leakage[0] == 0.0);
  // Each AND output is Bern(1/4); after BSC(0.3) the eavesdropper sees
  // Bern(0.4), so each of the two uses leaks h(0.4) - h(0.3).
  const double per_use = binary_entropy(0.4) - binary_entropy(0.3);
  CHECK(std::abs(report.leakage[1] - 2.0 * per_use / 4.0) < 1e-12);
  CHECK(report.violations.empty());

  // Converse sanity at the delivered rate of 0.5 bits per symbol.
  RateDistortionCurve curve(source);
  CHECK(report.expected_distortion >= curve.distortion_at_rate(0.5) - 1e-9);

  // Identical runs produce identical reports.
  const auto again = run_exact(code, source, w, g, big_L, 0.3);
  CHECK(again.expected_distortion == report.expected_distortion);
  CHECK(again.leakage == report.leakage);
}

TEST_CASE("builtin null code reaches the best-constant distortion") {
  const SourceSpec source(Pmf({0.3, 0.7}), kHamming2);
  const auto g = step_from_rates(std::vector<double>{1.0});
  const auto w = blind_kernel(Dmc::identity(2));
  const auto code = builtin_code(BuiltinCode::kNull, source, w, g, 1, 2);
  const auto report =
      run_exact(code, source, w, g, CumulativeFn::zero(), 1.0);
  CHECK(std::abs(report.expected_distortion - source.d_max()) < 1e-15);
  CHECK(report.expected_distortion == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("builtin repeat code is lossless on a noiseless channel") {
  const SourceSpec source(Pmf({0.5, 0.5}), kHamming2);
  const auto g = step_from_rates(std::vector<double>{0.5, 0.5});
  const auto w = blind_kernel(Dmc::identity(2));
  const auto code = builtin_code(BuiltinCode::kRepeat, source, w, g, 2, 2);
  const auto report =
      run_exact(code, source, w, g, CumulativeFn::zero(), 0.0);
  CHECK(report.expected_distortion == 0.0);
  CHECK(report.violations.empty());
}

TEST_CASE("builtin quantize-and-index obeys the converse") {
  // n = 4 symbols, one block, 2 channel bits: half the symbols survive.
  const SourceSpec source(Pmf({0.5, 0.5}), kHamming2);
  const auto g = step_from_rates(std::vector<double>{0.5});
  const auto w = blind_kernel(Dmc::identity(2));
  const auto code = builtin_code(BuiltinCode::kQuantizeIndex, source, w, g, 1, 4);
  const auto report =
      run_exact(code, source, w, g, CumulativeFn::zero(), 0.5);
  CHECK(std::abs(report.expected_distortion - 0.25) < 1e-12);
  RateDistortionCurve curve(source);
  CHECK(report.expected_distortion >=
        curve.distortion_at_rate(0.5) - 1e-9);
}

TEST_CASE("monotone leakage audit") {
  AuditReport ok;
  ok.leakage = {0.1, 0.1, 0.25};
  CHECK(audit_monotone_leakage(ok, 2, 3).ok);

  AuditReport bad;
  bad.leakage = {0.1, 0.3, 0.2};
  const auto rep = audit_monotone_leakage(bad, 2, 3);
  CHECK_FALSE(rep.ok);
  CHECK(rep.first_decrease == 3);

  AuditReport single;
  single.leakage = {0.4};
  CHECK(audit_monotone_leakage(single, 2, 1).ok);
}

TEST_CASE("leakage of real runs is monotone") {
  const SourceSpec source(Pmf({0.5, 0.5}), kHamming2);
  const auto g = step_from_rates(std::vector<double>{0.5, 0.5});
  const auto w = WiretapKernel::degraded(Dmc::identity(2), Dmc::bsc(0.2));
  const auto code = builtin_code(BuiltinCode::kRepeat, source, w, g, 2, 2);
  const auto big_L = CumulativeFn::step({0.0, 1.0}, {0.0, 10.0});
  const auto report = run_exact(code, source, w, g, big_L, 0.0);
  CHECK(audit_monotone_leakage(report, 2, 2).ok);
}

TEST_CASE("structural guards") {
  auto code = identity_code_k1n2();
  const SourceSpec source(Pmf({0.5, 0.5}), kHamming2);
  const auto w = blind_kernel(Dmc::identity(2));

  // Encoder output beyond the block budget is rejected.
  auto over = code;
  over.encoders[0][0] = 7;  // only 4 strings fit in two binary uses
  CHECK_THROWS_AS(over.validate(), validation_error);

  // A schedule inconsistent with G is rejected.
  const auto other_g = step_from_rates(std::vector<double>{0.5});
  CHECK_THROWS_AS(run_exact(code, source, w, other_g, CumulativeFn::zero(), 1.0),
                  validation_error);

  // Desk-scale cap: 2^13 source symbols x 2^13 channel uses is too much.
  SequentialCode big;
  big.k = 1;
  big.n = 13;
  big.x_size = big.u_size = big.v_size = big.xhat_size = 2;
  const auto g_big = step_from_rates(std::vector<double>{1.0});
  big.schedule = BlockSchedule::from_crdf(g_big, 1, 13);
  big.encoders = {std::vector<std::uint32_t>(std::size_t{1} << 13, 0)};
  big.decoder.assign(std::size_t{1} << 13, 0);
  CHECK_THROWS_AS(run_exact(big, source, w, g_big, CumulativeFn::zero(), 1.0),
                  feasibility_error);
}

TEST_CASE("monte-carlo distortion agrees with enumeration on a clean code") {
  const auto code = identity_code_k1n2();
  const SourceSpec source(Pmf({0.5, 0.5}), kHamming2);
  CHECK(mc_distortion(code, source, Dmc::identity(2), 3, 500) == 0.0);
  // Through a BSC the estimate must hover near the symbol error rate.
  const double est = mc_distortion(code, source, Dmc::bsc(0.1), 5, 20000);
  CHECK(std::abs(est - 0.1) < 0.01);
  // Seeded runs repeat bit for bit.
  CHECK(mc_distortion(code, source, Dmc::bsc(0.1), 5, 20000) == est);
}
