#pragma once

#include <array>
#include <cmath>

#include "coarse/metric_space.hpp"

namespace coarse {

/// Base space with d replaced by ln(1 + d), evaluated exactly (no chordal
/// encoding is needed for pointwise distances).
class LogScaledSpace final : public MetricSpace {
 public:
  explicit LogScaledSpace(SpacePtr base) : base_(std::move(base)) {}

  std::size_t size() const override { return base_->size(); }
  double distance(std::size_t i, std::size_t j) const override {
    return std::log1p(base_->distance(i, j));
  }
  std::string describe() const override { return "log[" + base_->describe() + "]"; }
  const LatticeSpace* underlying_lattice() const override {
    return base_->underlying_lattice();
  }

 private:
  SpacePtr base_;
};

struct DeltaReport {
  std::size_t quadruples_checked = 0;
  double delta = 0.0;
  std::array<std::size_t, 4> witness{0, 0, 0, 0};  // lexicographically smallest attaining
};

/// Four-point value of one quadruple: sort the three pairwise sums
/// d(x,y)+d(z,w), d(x,z)+d(y,w), d(x,w)+d(y,z) descending; the value is half
/// the gap between the two largest.
double four_point_value(const MetricSpace& space, std::size_t x, std::size_t y, std::size_t z,
                        std::size_t w);

/// Maximum four-point value over the plan's quadruples. Exhaustive plans are
/// accepted only for spaces of at most 40 points; a sampled delta is a lower
/// bound on the true constant and is reported as such. Deterministic for a
/// given plan.
DeltaReport four_point_delta(const MetricSpace& space, const SamplePlan& plan);

}  // namespace coarse
