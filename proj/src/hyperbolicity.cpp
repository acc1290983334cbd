#include "coarse/hyperbolicity.hpp"

#include <algorithm>
#include <stdexcept>

namespace coarse {

double four_point_value(const MetricSpace& space, std::size_t x, std::size_t y, std::size_t z,
                        std::size_t w) {
  double s0 = space.distance(x, y) + space.distance(z, w);
  double s1 = space.distance(x, z) + space.distance(y, w);
  double s2 = space.distance(x, w) + space.distance(y, z);
  if (s0 < s1) std::swap(s0, s1);
  if (s0 < s2) std::swap(s0, s2);
  if (s1 < s2) std::swap(s1, s2);
  return (s0 - s1) / 2.0;
}

DeltaReport four_point_delta(const MetricSpace& space, const SamplePlan& plan) {
  const std::size_t n = space.size();
  if (n < 4) throw std::invalid_argument("four_point_delta: need at least 4 points");

  DeltaReport report;
  bool first = true;
  auto consider = [&](std::array<std::size_t, 4> q) {
    const double value = four_point_value(space, q[0], q[1], q[2], q[3]);
    ++report.quadruples_checked;
    std::sort(q.begin(), q.end());
    if (first || value > report.delta || (value == report.delta && q < report.witness)) {
      report.delta = value;
      report.witness = q;
      first = false;
    }
  };

  if (plan.exhaustive) {
    if (n > 40)
      throw std::invalid_argument("four_point_delta: exhaustive plan limited to 40 points");
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = x + 1; y < n; ++y)
        for (std::size_t z = y + 1; z < n; ++z)
          for (std::size_t w = z + 1; w < n; ++w) consider({x, y, z, w});
  } else {
    Rng rng(plan.seed);
    for (std::size_t s = 0; s < plan.samples; ++s) {
      std::array<std::size_t, 4> q;
      for (auto& v : q) v = rng.next_index(n);
      consider(q);
    }
  }
  return report;
}

}  // namespace coarse
