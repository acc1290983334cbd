#include "coarse/qi_repair.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace coarse {

void CoarseProfile::validate() const {
  if (!contraction.unbounded() || !dilation.unbounded())
    throw std::invalid_argument("CoarseProfile: contraction and dilation must be unbounded");
  std::set<double> grid;
  for (const auto& b : contraction.breakpoints()) grid.insert(b.x);
  for (const auto& b : dilation.breakpoints()) grid.insert(b.x);
  grid.insert(2.0 * std::max(contraction.last_x(), dilation.last_x()) + 1.0);
  for (const double r : grid) {
    if (contraction.eval(r) > dilation.eval(r) + kTol)
      throw std::invalid_argument("CoarseProfile: contraction exceeds dilation");
  }
}

QISchedulePair::QISchedulePair(CoarseProfile profile, int steps) : profile_(std::move(profile)) {
  profile_.validate();
  if (steps < 1) throw std::invalid_argument("QISchedulePair: steps must be >= 1");
  a_.push_back(1.0);
  b_.push_back(std::max(profile_.dilation.eval(1.0), 1.0));
  extend_steps(steps);
}

QISchedulePair QISchedulePair::build(CoarseProfile profile, int steps) {
  return QISchedulePair(std::move(profile), steps);
}

void QISchedulePair::push_step() {
  const std::size_t k = a_.size();
  const double a1 = a_[k - 1], a2 = k >= 2 ? a_[k - 2] : 0.0;
  const double b1 = b_[k - 1], b2 = k >= 2 ? b_[k - 2] : 0.0;
  a_.push_back(std::max(profile_.contraction.sup_preimage_le(b1), a1 + (a1 - a2)));
  b_.push_back(std::max(profile_.dilation.eval(a_.back()), b1 + (b1 - b2)));
}

void QISchedulePair::extend_steps(int extra) {
  for (int i = 0; i < extra; ++i) push_step();
}

void QISchedulePair::ensure_coverage(double max_distance) {
  const double needed_b = profile_.dilation.eval(max_distance);
  while (a_.back() < max_distance || b_.back() < needed_b) push_step();
}

namespace {

PiecewiseLinearFn anchors_to_fn(const std::vector<double>& anchors) {
  std::vector<Breakpoint> bps;
  bps.reserve(anchors.size() + 1);
  bps.push_back({0.0, 0.0});
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    bps.push_back({anchors[k], static_cast<double>(k + 1)});
  }
  const std::size_t last = anchors.size() - 1;
  const double prev = last >= 1 ? anchors[last - 1] : 0.0;
  return PiecewiseLinearFn(std::move(bps), 1.0 / (anchors[last] - prev));
}

}  // namespace

PiecewiseLinearFn QISchedulePair::domain_fn() const { return anchors_to_fn(a_); }
PiecewiseLinearFn QISchedulePair::codomain_fn() const { return anchors_to_fn(b_); }

PairDiffStats verify_qi_additive(const SampledMap& map, const PiecewiseLinearFn& cx,
                                 const PiecewiseLinearFn& cy, const SamplePlan& plan) {
  if (!map.domain || !map.codomain || !map.forward)
    throw std::invalid_argument("verify_qi_additive: incomplete map");

  PairDiffStats stats;
  stats.min_diff = std::numeric_limits<double>::infinity();
  stats.max_diff = -std::numeric_limits<double>::infinity();

  auto visit = [&](std::size_t i, std::size_t j) {
    const double dx = cx.eval(map.domain->distance(i, j));
    const double dy = cy.eval(map.codomain->distance(map.forward(i), map.forward(j)));
    const double diff = dy - dx;
    ++stats.pairs_checked;
    if (diff < stats.min_diff) {
      stats.min_diff = diff;
      stats.min_witness = {i, j};
    }
    if (diff > stats.max_diff) {
      stats.max_diff = diff;
      stats.max_witness = {i, j};
    }
  };

  const std::size_t n = map.domain->size();
  if (plan.exhaustive) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) visit(i, j);
  } else {
    Rng rng(plan.seed);
    for (std::size_t s = 0; s < plan.samples; ++s) visit(rng.next_index(n), rng.next_index(n));
  }
  if (stats.pairs_checked == 0) {
    stats.min_diff = stats.max_diff = 0.0;
  }
  return stats;
}

PairDiffStats verify_qi_additive(const SampledMap& map, const QISchedulePair& pair,
                                 const SamplePlan& plan) {
  return verify_qi_additive(map, pair.domain_fn(), pair.codomain_fn(), plan);
}

PiecewiseLinearFn build_lsl_schedule(const PiecewiseLinearFn& dilation, int steps) {
  if (!dilation.unbounded())
    throw std::invalid_argument("build_lsl_schedule: dilation must be unbounded");
  if (steps < 1) throw std::invalid_argument("build_lsl_schedule: steps must be >= 1");
  std::vector<double> b;
  b.push_back(std::max(dilation.eval(1.0), 1.0));
  for (int k = 1; k <= steps; ++k) {
    const double b1 = b.back();
    const double b2 = b.size() >= 2 ? b[b.size() - 2] : 0.0;
    b.push_back(std::max(dilation.eval(static_cast<double>(k + 1)), b1 + (b1 - b2)));
  }
  std::vector<Breakpoint> bps;
  bps.reserve(b.size() + 1);
  bps.push_back({0.0, 0.0});
  for (std::size_t k = 0; k < b.size(); ++k) {
    bps.push_back({b[k], static_cast<double>(k + 1)});
  }
  const double prev = b.size() >= 2 ? b[b.size() - 2] : 0.0;
  return PiecewiseLinearFn(std::move(bps), 1.0 / (b.back() - prev));
}

}  // namespace coarse
