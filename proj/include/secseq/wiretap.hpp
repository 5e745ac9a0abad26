#pragma once

#include <cstdint>
#include <vector>

#include "secseq/probkit.hpp"

namespace secseq {

struct CapacityResult {
  double capacity_bits = 0.0;
  Pmf input;
  int iterations = 0;
};

/// Channel capacity C = max_p I(U;V) by Blahut-Arimoto iteration; the
/// duality gap at termination is below 1e-12 nats.
CapacityResult capacity(const Dmc& ch);

/// Joint weight p(w,u) over an auxiliary alphabet and the channel input.
struct AuxiliaryInput {
  std::size_t aux_size = 0;
  std::vector<double> joint;  // row-major aux_size * input_size
  double at(std::size_t w, std::size_t u, std::size_t nu) const {
    return joint[w * nu + u];
  }
};

struct SecrecyResult {
  double secrecy_bits = 0.0;
  AuxiliaryInput input;
  int best_start = -1;  // -1 when no direction improved on zero
};

/// Secrecy capacity max_{p(w,u)} I(W;V) - I(W;Z) by deterministic
/// multi-start exponentiated-gradient ascent. Starts include a coarse grid
/// of W=U couplings (for small inputs), the capacity-achieving input, and
/// seeded random joints. Results are bit-identical across thread counts:
/// starts are independent and merged by (objective, start index).
SecrecyResult secrecy_capacity(const WiretapKernel& w, std::size_t aux_size = 0,
                               std::uint64_t seed = 0, int threads = 1);

struct BoundaryPoint {
  double rate = 0.0;     // R, bits per channel use
  double leakage = 0.0;  // minimal required R_L at this rate
};

/// Channel-side summary: capacity, secrecy capacity, and a certified
/// linear cap (C1, C2, ell) whose region {R_L > max(0, ell (R - C1)),
/// R < C2} lies inside the swept rate-leakage region.
struct ChannelSummary {
  double C = 0.0;
  double C_WT = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double ell = 1.0;
  Pmf capacity_input = Pmf({1.0});
  AuxiliaryInput secrecy_input;
  bool degenerate = false;
};

struct BoundarySweep {
  std::vector<BoundaryPoint> points;
  ChannelSummary summary;
};

/// Sweeps auxiliary-input candidates and returns the lower envelope of the
/// required leakage over a rate grid, together with the extracted summary.
/// ell is the smallest slope through (C1, 0) that dominates the swept
/// boundary, so possibly suboptimal but always certified.
BoundarySweep rate_leakage_boundary(const WiretapKernel& w, std::size_t grid = 64,
                                    std::uint64_t seed = 0, int threads = 1);

/// Pre-coding with an independent uniform key: m' = (m + q) mod 2^n_bits.
std::uint64_t precode(std::uint64_t m, std::uint64_t q, unsigned n_bits);
std::uint64_t precode_inverse(std::uint64_t m_prime, std::uint64_t q,
                              unsigned n_bits);

/// Exact law of precode(M, Q) for independent M ~ message and Q ~ key over
/// the same cyclic group (sizes must match).
Pmf precode_pushforward(const Pmf& message, const Pmf& key);

}  // namespace secseq
