#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "secseq/probkit.hpp"

namespace secseq {

enum class CumKind { kStep, kPiecewiseLinear };

/// Continuous piecewise-linear function on [0,1] given by its knots.
class PiecewiseLinearFn {
 public:
  PiecewiseLinearFn(std::vector<double> alphas, std::vector<double> values);

  double operator()(double alpha) const;
  const std::vector<double>& alphas() const noexcept { return a_; }
  const std::vector<double>& values() const noexcept { return v_; }
  std::size_t knot_count() const noexcept { return a_.size(); }

 private:
  std::vector<double> a_, v_;
};

/// A cumulative function on normalized block time [0,1]. Step functions are
/// stored by their right-continuous level on each [b_j, b_{j+1}) plus the
/// point value at alpha = 1, so values.size() == breakpoints.size(); the
/// piecewise-linear kind stores knot values. Regularity (non-decreasing,
/// zero at 0) is checked by validate_regular, not at construction, so that
/// ill-formed inputs can be diagnosed.
class CumulativeFn {
 public:
  static CumulativeFn step(std::vector<double> breakpoints,
                           std::vector<double> values);
  static CumulativeFn piecewise_linear(std::vector<double> breakpoints,
                                       std::vector<double> values);
  /// Step function built from per-block increments; breakpoints i/k. The
  /// given rates are kept as the exact jump sizes.
  static CumulativeFn from_rates(std::span<const double> rates);
  static CumulativeFn zero();

  CumKind kind() const noexcept { return kind_; }
  const std::vector<double>& breakpoints() const noexcept { return b_; }
  const std::vector<double>& values() const noexcept { return v_; }
  /// Step kind: jump size at each breakpoint (index 0 is the level at 0).
  const std::vector<double>& jumps() const;

  /// Right-continuous evaluation (step) or interpolation (linear).
  double eval(double alpha) const;
  /// Left limit; eval_left(0) == eval(0).
  double eval_left(double alpha) const;
  double total() const { return v_.back(); }

  bool same_representation(const CumulativeFn& other) const;

 private:
  CumulativeFn(CumKind kind, std::vector<double> b, std::vector<double> v,
               std::vector<double> jumps);

  CumKind kind_;
  std::vector<double> b_, v_;
  std::vector<double> jumps_;  // step kind only
};

/// Outcome of checking the three regularity properties. `ok` when all hold;
/// otherwise `property` names the first violated one and `location` the
/// offending breakpoint.
struct RegularityReport {
  bool ok = true;
  std::string property;
  double location = 0.0;
  std::string message;
};

RegularityReport validate_regular(const CumulativeFn& f);

/// Step CRDF with increments r_1..r_k on the uniform 1/k grid.
CumulativeFn step_from_rates(std::span<const double> rates);

/// Per-block increments r_i = G(i/k) - G((i-1)/k). Exact inverse of
/// step_from_rates: jump sizes are summed per grid cell, never re-derived
/// by subtraction, so the round trip returns the original rates bit-for-bit.
std::vector<double> rates_from_crdf(const CumulativeFn& g, std::size_t k);

/// Least concave function dominating f on [0,1]: the upper convex hull of
/// the graph points (for steps, each jump contributes its left limit and
/// its top). Ties in alpha keep the larger value.
PiecewiseLinearFn concave_envelope(const CumulativeFn& f);
PiecewiseLinearFn concave_envelope(const PiecewiseLinearFn& f);

struct Segment {
  double length;
  double slope;
};

/// Segment decomposition of a piecewise-linear function; lengths sum to 1.
std::vector<Segment> slopes(const PiecewiseLinearFn& f);

}  // namespace secseq
