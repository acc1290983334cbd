#pragma once

#include <cmath>
#include <vector>

#include "coarse/common.hpp"
#include "coarse/pl_function.hpp"

namespace coarse::testing {

// The rescaling grown from the control 2r+1: breakpoints at 1, 3, 7, 15 with
// values 1, 2, 3, 4. Used all over as the canonical concave example.
inline PiecewiseLinearFn doubling_rescaling() {
  return PiecewiseLinearFn({{0, 0}, {1, 1}, {3, 2}, {7, 3}, {15, 4}}, 1.0 / 16.0);
}

// Random nondecreasing piecewise-linear function with `segments` pieces and
// slopes drawn from [0, 3); roughly a third come out concave.
inline PiecewiseLinearFn random_monotone_fn(Rng& rng, int segments = 5) {
  std::vector<Breakpoint> bps{{0.0, rng.next_unit() < 0.3 ? 0.0 : rng.next_real(0.0, 2.0)}};
  double x = 0.0, y = bps[0].y;
  for (int s = 0; s < segments; ++s) {
    x += rng.next_real(0.25, 3.0);
    y += rng.next_real(0.0, 3.0) * (x - bps.back().x);
    bps.push_back({x, y});
  }
  return PiecewiseLinearFn(std::move(bps), rng.next_unit() < 0.2 ? 0.0 : rng.next_real(0.0, 2.0));
}

// Random concave function vanishing only at zero: positive strictly
// decreasing slopes.
inline PiecewiseLinearFn random_concave_fn(Rng& rng, int segments = 5) {
  std::vector<Breakpoint> bps{{0.0, 0.0}};
  double slope = rng.next_real(1.0, 4.0);
  double x = 0.0, y = 0.0;
  for (int s = 0; s < segments; ++s) {
    const double dx = rng.next_real(0.5, 3.0);
    x += dx;
    y += slope * dx;
    bps.push_back({x, y});
    slope *= rng.next_real(0.3, 0.95);
  }
  return PiecewiseLinearFn(std::move(bps), slope);
}

// Random convex superlinear control: strictly increasing slopes, nondecreasing
// values, unbounded.
inline PiecewiseLinearFn random_superlinear_fn(Rng& rng, int segments = 4) {
  std::vector<Breakpoint> bps{{0.0, rng.next_real(0.0, 2.0)}};
  double slope = rng.next_real(0.2, 1.5);
  double x = 0.0, y = bps[0].y;
  for (int s = 0; s < segments; ++s) {
    const double dx = rng.next_real(0.5, 2.5);
    slope *= rng.next_real(1.3, 2.5);
    x += dx;
    y += slope * dx;
    bps.push_back({x, y});
  }
  return PiecewiseLinearFn(std::move(bps), slope * rng.next_real(1.3, 2.5));
}

// Independent subadditivity oracle: plain double loop over the same grid
// definition analyze() uses (multiples of step up to twice the last
// breakpoint, plus the breakpoints themselves).
inline bool subadditive_on_grid(const PiecewiseLinearFn& f, double step) {
  std::vector<double> grid{0.0};
  for (double g = step; g <= 2.0 * f.last_x() + kTol; g += step) grid.push_back(g);
  for (const auto& b : f.breakpoints()) grid.push_back(b.x);
  for (const double a : grid) {
    for (const double b : grid) {
      if (f.eval(a + b) > f.eval(a) + f.eval(b) + kTol) return false;
    }
  }
  return true;
}

}  // namespace coarse::testing
