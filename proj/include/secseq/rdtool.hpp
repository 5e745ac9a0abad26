#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "secseq/probkit.hpp"

namespace secseq {

/// Finite source with a per-letter distortion matrix. Entries may be +inf
/// (forbidden pairs), but every source letter needs at least one finite
/// reconstruction and the best constant reconstruction must be finite.
struct SourceSpec {
  SourceSpec(Pmf px, std::vector<std::vector<double>> distortion);

  Pmf px;
  std::size_t nx = 0, nxhat = 0;
  std::vector<double> d;  // row-major nx * nxhat

  double dist(std::size_t x, std::size_t xhat) const { return d[x * nxhat + xhat]; }
  double d_min() const noexcept { return d_min_; }
  double d_max() const noexcept { return d_max_; }
  /// Reconstruction letter of the best constant guess.
  std::size_t best_constant() const noexcept { return best_constant_; }

 private:
  double d_min_ = 0.0, d_max_ = 0.0;
  std::size_t best_constant_ = 0;
};

/// Queryable R(D) / D(R) curve computed by alternating minimization over
/// test channels with a Lagrange-parameter sweep. Queries are thread-safe;
/// the parametric sweep is cached on first use.
class RateDistortionCurve {
 public:
  explicit RateDistortionCurve(SourceSpec source);

  const SourceSpec& source() const noexcept { return s_; }
  double d_min() const noexcept { return s_.d_min(); }
  double d_max() const noexcept { return s_.d_max(); }
  /// Rate at minimal distortion, R(d_min), in bits per source symbol.
  double max_rate() const;

  /// R(D) in bits per source symbol. Throws feasibility_error for D < d_min.
  double rate_at_distortion(double distortion) const;
  /// D(R); clamps to d_min for R >= R(d_min) and returns d_max at R <= 0.
  double distortion_at_rate(double rate) const;

  /// Cached parametric samples as (D, R) pairs, sorted by increasing D.
  std::vector<std::pair<double, double>> samples() const;

 private:
  struct Sweep;
  const Sweep& sweep() const;

  SourceSpec s_;
  mutable std::mutex mu_;
  mutable std::shared_ptr<const Sweep> sweep_;
};

/// One-shot conveniences over a freshly built curve.
double rate_at_distortion(const SourceSpec& s, double distortion);
double distortion_at_rate(const SourceSpec& s, double rate);

/// Binary-Hamming regression oracle h(p) - h(distortion).
double closed_form_binary(double p, double distortion);

/// Binary entropy in bits.
double binary_entropy(double p);

}  // namespace secseq
