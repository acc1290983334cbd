#pragma once

#include <span>
#include <string>
#include <vector>

#include "coarse/pl_function.hpp"

namespace coarse {

/// Breakpoint schedule a_0 = 1 < a_1 < ... and the concave piecewise-affine
/// rescaling c with c(0) = 0 and c(a_k) = k + 1, grown from one or more
/// nondecreasing control functions by
///
///   a_k = max( max_i D_i(a_{k-1}),  a_{k-1} + (a_{k-1} - a_{k-2}) )
///
/// The first argument forces the transported control to stay affine, the
/// second keeps the spacings nondecreasing and hence c concave. The schedule
/// extends on demand; snapshots taken through fn() are immutable.
class FlatteningSchedule {
 public:
  static FlatteningSchedule build(PiecewiseLinearFn control, int steps, std::string source = "");
  static FlatteningSchedule build_multi(std::vector<PiecewiseLinearFn> controls, int steps,
                                        std::string source = "");

  /// a_0, a_1, ..., a_K (a_{-1} = 0 is implicit).
  const std::vector<double>& anchors() const { return anchors_; }
  int steps() const { return static_cast<int>(anchors_.size()) - 1; }
  const std::string& source() const { return source_; }
  const std::vector<PiecewiseLinearFn>& controls() const { return controls_; }

  void extend_steps(int extra);
  /// Grow until the last anchor reaches r.
  void ensure_anchor_at_least(double r);
  /// Grow until c's value at the last anchor reaches r_prime.
  void ensure_value_at_least(double r_prime);

  /// Snapshot of c. Beyond the last anchor the tail continues the final
  /// segment's slope, which majorizes any further extension of the schedule;
  /// grow the schedule first when evaluations past a_K must be exact.
  PiecewiseLinearFn fn() const;

 private:
  FlatteningSchedule(std::vector<PiecewiseLinearFn> controls, int steps, std::string source);
  void push_step();

  std::vector<PiecewiseLinearFn> controls_;
  std::vector<double> anchors_;
  std::string source_;
};

struct AffineBound {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Transport of an affine control bound r -> slope*r + intercept through a
/// concave unbounded rescaling c with c(0) = 0: the slope survives (for
/// slope >= 1) and the intercept becomes c(intercept).
AffineBound transformed_control_bound(const AffineBound& bound, const PiecewiseLinearFn& c);

struct FlattenSample {
  double r_prime = 0.0;
  double transported = 0.0;  // c(D(c^{-1}(r')))
  double excess = 0.0;       // transported - r'
};

struct FlattenReport {
  std::vector<FlattenSample> rows;
  double max_excess = 0.0;  // over samples whose preimage is nonzero
  double bound = 0.0;
  bool pass = false;
};

/// Measures the transported control c o D o c^{-1} at each r' and checks the
/// excess over r' stays within 2. Samples whose preimage under c collapses to
/// zero are reported but excluded from the bound. The schedule grows as
/// needed to keep every evaluation inside its exact range.
FlattenReport verify_flattening(FlatteningSchedule& schedule, const PiecewiseLinearFn& control,
                                std::span<const double> r_primes, double tol = kTol);

/// Same measurement after the hyperbolizing correction c'' = log_corrected(c):
/// the excess bound becomes ln 3 plus the documented chord error of the
/// correction.
FlattenReport verify_log_control(FlatteningSchedule& schedule, const PiecewiseLinearFn& control,
                                 std::span<const double> r_dprimes, int extra_nodes = 4,
                                 double tol = kTol);

}  // namespace coarse
