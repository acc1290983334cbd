#pragma once

#include <optional>
#include <vector>

#include "coarse/common.hpp"

namespace coarse {

struct Breakpoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Monotone piecewise-linear function on [0, inf).
///
/// Defined by breakpoints (strictly increasing in x, starting at x = 0,
/// nondecreasing in y) with affine interpolation between them and an affine
/// continuation of slope `tail_slope` beyond the last one. A bounded function
/// is encoded with tail_slope 0. Instances are immutable and safe to share
/// across threads.
class PiecewiseLinearFn {
 public:
  PiecewiseLinearFn(std::vector<Breakpoint> breakpoints, double tail_slope);

  static PiecewiseLinearFn identity();
  // slope * r + intercept, encoded as (0, intercept), (1, slope + intercept).
  static PiecewiseLinearFn affine(double slope, double intercept);

  double eval(double r) const;
  double operator()(double r) const { return eval(r); }

  /// Least r with eval(r) >= y. Returns 0 when y is below every attainable
  /// value (the inverse extended by 0 below the image). Throws
  /// std::range_error when y exceeds the image of a bounded function.
  double inverse_or_zero(double y) const;

  /// Largest r with eval(r) <= y; on a flat run at level y this is the run's
  /// right endpoint. Returns 0 when even eval(0) > y. For a bounded function
  /// with y at or above the supremum the preimage is unbounded and a
  /// std::range_error is thrown.
  double sup_preimage_le(double y) const;

  /// All y values and the tail slope multiplied by factor > 0.
  PiecewiseLinearFn scaled(double factor) const;

  /// Chordal piecewise-linear interpolation of r -> ln(eval(r) + 1).
  ///
  /// Nodes are all breakpoints of this function plus `extra_nodes` additional
  /// ones spaced so that x+1 doubles past the last breakpoint. The result is
  /// exact at every node, never exceeds ln(eval(x)+1) between nodes, and is
  /// concave whenever this function is concave. Beyond the last node the
  /// continuation uses the right derivative of ln(eval+1) there, so callers
  /// must size `extra_nodes` (or the breakpoint span) to cover their queries.
  PiecewiseLinearFn log_corrected(int extra_nodes) const;

  const std::vector<Breakpoint>& breakpoints() const { return bps_; }
  double tail_slope() const { return tail_slope_; }
  double last_x() const { return bps_.back().x; }
  double last_y() const { return bps_.back().y; }
  // Bounded functions are encoded with tail slope exactly 0.
  bool unbounded() const { return tail_slope_ > 0.0; }

  friend bool operator==(const PiecewiseLinearFn&, const PiecewiseLinearFn&) = default;

 private:
  std::vector<Breakpoint> bps_;
  double tail_slope_;
};

struct SubadditivityWitness {
  double a = 0.0;
  double b = 0.0;
};

struct FnAnalysis {
  bool is_nondecreasing = false;
  bool is_concave = false;
  bool is_subadditive = false;
  bool vanishes_only_at_zero = false;
  bool is_unbounded = false;
  std::optional<SubadditivityWitness> witness;  // eval(a+b) > eval(a) + eval(b)
};

/// Monotonicity and concavity are decided exactly from the slopes. A concave
/// function here is subadditive outright (values are nonnegative and
/// f(0) >= 0); otherwise subadditivity is brute-forced over the grid
/// {0, grid_step, 2*grid_step, ...} up to twice the last breakpoint, plus all
/// breakpoint pairs, returning the first violating pair found.
FnAnalysis analyze(const PiecewiseLinearFn& f, double grid_step);

/// Exact composition outer(inner(r)) as a piecewise-linear function.
PiecewiseLinearFn compose(const PiecewiseLinearFn& outer, const PiecewiseLinearFn& inner);

/// Upper bound on max_x ln(eval(f,x)+1) - eval(log_corrected(f, extra_nodes), x)
/// over the node span, from the closed-form worst chord deviation of ln on
/// each node interval.
double log_chord_error_bound(const PiecewiseLinearFn& f, int extra_nodes);

}  // namespace coarse
