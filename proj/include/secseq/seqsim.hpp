#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "secseq/bounds.hpp"
#include "secseq/cumfn.hpp"
#include "secseq/probkit.hpp"
#include "secseq/rdtool.hpp"

namespace secseq {

/// Explicit sequential source-channel code at desk scale. Encoder i maps
/// the first i*n source symbols (as one lexicographic index, first symbol
/// most significant) to one channel string of block_length(i) symbols,
/// also as a lexicographic index. The decoder maps the full legitimate
/// output string to a reconstruction string.
struct SequentialCode {
  std::size_t k = 0, n = 0;
  BlockSchedule schedule;
  std::size_t x_size = 0, u_size = 0, v_size = 0, xhat_size = 0;
  std::vector<std::vector<std::uint32_t>> encoders;  // [i][x-prefix] -> u-block
  std::vector<std::uint32_t> decoder;                // [v-string] -> xhat-string

  void validate() const;
};

struct Violation {
  std::string constraint;  // "leakage" or "distortion"
  std::size_t block = 0;   // 1-based; 0 for the distortion constraint
  double margin = 0.0;     // amount by which the constraint is exceeded
};

struct AuditReport {
  double expected_distortion = 0.0;
  double d_bar = 0.0;
  std::vector<double> leakage;         // (1/nk) I(X^{in}; Z^{m_i}) per block
  std::vector<double> leakage_budget;  // L(i/k) per block
  std::vector<Violation> violations;
};

/// Exact audit of a code against the distortion level and the cumulative
/// leakage budget: enumerates the full joint law, so everything reported
/// is exact up to rounding. Enumeration cost is guarded at 2^24 cells.
AuditReport run_exact(const SequentialCode& code, const SourceSpec& source,
                      const WiretapKernel& w, const CumulativeFn& G,
                      const CumulativeFn& L, double d_bar);

/// Cumulative mutual information must not shrink as blocks accumulate;
/// a failure indicates a bug, not a property of the code.
struct MonotoneLeakageReport {
  bool ok = true;
  std::size_t first_decrease = 0;  // 1-based block index of the violation
};
MonotoneLeakageReport audit_monotone_leakage(const AuditReport& report,
                                             std::size_t n, std::size_t k);

enum class BuiltinCode { kNull, kRepeat, kQuantizeIndex };

/// Ready-made codes so small scenarios need no hand-authored tables.
/// kNull sends a fixed symbol and reconstructs the best constant;
/// kRepeat spreads each fresh source symbol over the block's channel
/// budget and decodes by majority; kQuantizeIndex allocates the block's
/// message space across the fresh symbols with a greedy scalar quantizer.
SequentialCode builtin_code(BuiltinCode kind, const SourceSpec& source,
                            const WiretapKernel& w, const CumulativeFn& G,
                            std::size_t k, std::size_t n);

/// Seeded Monte-Carlo estimate of the expected distortion (no mutual
/// information); the secondary mode for instances too large to enumerate.
double mc_distortion(const SequentialCode& code, const SourceSpec& source,
                     const Dmc& main_channel, std::uint64_t seed,
                     std::size_t trials);

}  // namespace secseq
