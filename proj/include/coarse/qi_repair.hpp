#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "coarse/metric_space.hpp"
#include "coarse/pl_function.hpp"

namespace coarse {

/// Contraction and dilation profile of a coarse equivalence f:
/// contraction(d(x,x')) <= d(f x, f x') <= dilation(d(x,x')). Both must be
/// nondecreasing and unbounded, with contraction <= dilation pointwise.
struct CoarseProfile {
  PiecewiseLinearFn contraction;
  PiecewiseLinearFn dilation;

  /// Throws std::invalid_argument when either function is bounded or the
  /// contraction exceeds the dilation on the merged breakpoint grid.
  void validate() const;
};

/// Interleaved schedules (a_k, b_k) and rescalings (c_X, c_Y) turning a map
/// with the given profile into an isometry up to additive constants (-2, +1):
///
///   b_0 = max(dilation(a_0), 1)
///   a_k = max( sup{ r : contraction(r) <= b_{k-1} },  a_{k-1} + (a_{k-1} - a_{k-2}) )
///   b_k = max( dilation(a_k),  b_{k-1} + (b_{k-1} - b_{k-2}) )
///
/// with c_X(a_k) = c_Y(b_k) = k + 1, both concave and vanishing only at 0.
class QISchedulePair {
 public:
  static QISchedulePair build(CoarseProfile profile, int steps);

  const std::vector<double>& domain_anchors() const { return a_; }
  const std::vector<double>& codomain_anchors() const { return b_; }
  PiecewiseLinearFn domain_fn() const;    // c_X
  PiecewiseLinearFn codomain_fn() const;  // c_Y

  void extend_steps(int extra);
  /// Grow until the domain anchors pass max_distance and the codomain anchors
  /// pass dilation(max_distance), so both rescalings evaluate exactly on every
  /// pair at distance <= max_distance.
  void ensure_coverage(double max_distance);

  const CoarseProfile& profile() const { return profile_; }

 private:
  QISchedulePair(CoarseProfile profile, int steps);
  void push_step();

  CoarseProfile profile_;
  std::vector<double> a_, b_;
};

/// A map between two finite metric spaces, sampled through point indices.
struct SampledMap {
  SpacePtr domain;
  SpacePtr codomain;
  std::function<std::size_t(std::size_t)> forward;
};

struct PairDiffStats {
  std::size_t pairs_checked = 0;
  double min_diff = 0.0;
  double max_diff = 0.0;
  std::array<std::size_t, 2> min_witness{0, 0};
  std::array<std::size_t, 2> max_witness{0, 0};

  bool within(double lo, double hi, double tol = kTol) const {
    return pairs_checked == 0 || (min_diff >= lo - tol && max_diff <= hi + tol);
  }
};

/// Distribution of d'_Y(f x, f x') - d'_X(x, x') over sampled pairs, where
/// d'_X = cx o d_X and d'_Y = cy o d_Y are built on top of the map's raw
/// spaces. The repair succeeds when every difference lies in [-2, 1]; the
/// bounds survive the log correction (its chords all have slope <= 1) and
/// shrink linearly under scaling of both rescalings.
PairDiffStats verify_qi_additive(const SampledMap& map, const PiecewiseLinearFn& cx,
                                 const PiecewiseLinearFn& cy, const SamplePlan& plan);
PairDiffStats verify_qi_additive(const SampledMap& map, const QISchedulePair& pair,
                                 const SamplePlan& plan);

/// Codomain rescaling c_Y for a coarse map with the given dilation, anchored
/// at the integers: b_k = max(dilation(k+1), b_{k-1} + (b_{k-1} - b_{k-2})),
/// c_Y(b_k) = k+1. Guarantees c_Y(dilation(r)) <= r + 1 for all r >= 0 up to
/// the built range, making the map large-scale Lipschitz.
PiecewiseLinearFn build_lsl_schedule(const PiecewiseLinearFn& dilation, int steps);

}  // namespace coarse
