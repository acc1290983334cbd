#include "coarse/flattening.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coarse {

FlatteningSchedule::FlatteningSchedule(std::vector<PiecewiseLinearFn> controls, int steps,
                                       std::string source)
    : controls_(std::move(controls)), source_(std::move(source)) {
  if (controls_.empty()) throw std::invalid_argument("FlatteningSchedule: no control functions");
  if (steps < 1) throw std::invalid_argument("FlatteningSchedule: steps must be >= 1");
  anchors_.push_back(1.0);
  extend_steps(steps);
}

FlatteningSchedule FlatteningSchedule::build(PiecewiseLinearFn control, int steps,
                                             std::string source) {
  std::vector<PiecewiseLinearFn> one;
  one.push_back(std::move(control));
  return FlatteningSchedule(std::move(one), steps, std::move(source));
}

FlatteningSchedule FlatteningSchedule::build_multi(std::vector<PiecewiseLinearFn> controls,
                                                   int steps, std::string source) {
  return FlatteningSchedule(std::move(controls), steps, std::move(source));
}

void FlatteningSchedule::push_step() {
  const std::size_t k = anchors_.size();
  const double prev = anchors_[k - 1];
  const double prev2 = k >= 2 ? anchors_[k - 2] : 0.0;
  double next = prev + (prev - prev2);
  for (const auto& control : controls_) next = std::max(next, control.eval(prev));
  anchors_.push_back(next);
}

void FlatteningSchedule::extend_steps(int extra) {
  for (int i = 0; i < extra; ++i) push_step();
}

void FlatteningSchedule::ensure_anchor_at_least(double r) {
  while (anchors_.back() < r) push_step();
}

void FlatteningSchedule::ensure_value_at_least(double r_prime) {
  // c(a_K) = K + 1.
  while (static_cast<double>(anchors_.size()) < r_prime) push_step();
}

PiecewiseLinearFn FlatteningSchedule::fn() const {
  std::vector<Breakpoint> bps;
  bps.reserve(anchors_.size() + 1);
  bps.push_back({0.0, 0.0});
  for (std::size_t k = 0; k < anchors_.size(); ++k) {
    bps.push_back({anchors_[k], static_cast<double>(k + 1)});
  }
  const std::size_t last = anchors_.size() - 1;
  const double prev = last >= 1 ? anchors_[last - 1] : 0.0;
  return PiecewiseLinearFn(std::move(bps), 1.0 / (anchors_[last] - prev));
}

AffineBound transformed_control_bound(const AffineBound& bound, const PiecewiseLinearFn& c) {
  if (bound.slope < 1.0)
    throw std::invalid_argument("transformed_control_bound: slope must be >= 1");
  if (bound.intercept < 0.0)
    throw std::invalid_argument("transformed_control_bound: negative intercept");
  const FnAnalysis fa = analyze(c, 1.0);
  if (!fa.is_concave || !fa.is_nondecreasing || !fa.is_unbounded || std::abs(c.eval(0.0)) > kTol)
    throw std::invalid_argument(
        "transformed_control_bound: rescaling must be concave, nondecreasing, unbounded, 0 at 0");
  return AffineBound{bound.slope, c.eval(bound.intercept)};
}

namespace {

FlattenReport run_chain(const PiecewiseLinearFn& control, const PiecewiseLinearFn& c,
                        std::span<const double> samples, double bound, double tol) {
  FlattenReport report;
  report.bound = bound;
  report.rows.reserve(samples.size());
  for (const double r_prime : samples) {
    const double r = c.inverse_or_zero(r_prime);
    const double transported = c.eval(control.eval(r));
    const double excess = transported - r_prime;
    report.rows.push_back({r_prime, transported, excess});
    if (r > 0.0) report.max_excess = std::max(report.max_excess, excess);
  }
  report.pass = report.max_excess <= bound + tol;
  return report;
}

double max_of(std::span<const double> values) {
  double top = 0.0;
  for (const double v : values) top = std::max(top, v);
  return top;
}

}  // namespace

FlattenReport verify_flattening(FlatteningSchedule& schedule, const PiecewiseLinearFn& control,
                                std::span<const double> r_primes, double tol) {
  const double top = max_of(r_primes);
  // Reach the largest sample, then push the anchors past the largest control
  // value the chain can feed back into c. Extending only appends anchors, so
  // the preimage computed in between stays exact.
  schedule.ensure_value_at_least(top + 1.0);
  const double r_max = schedule.fn().inverse_or_zero(top);
  schedule.ensure_anchor_at_least(control.eval(r_max));
  return run_chain(control, schedule.fn(), r_primes, 2.0, tol);
}

FlattenReport verify_log_control(FlatteningSchedule& schedule, const PiecewiseLinearFn& control,
                                 std::span<const double> r_dprimes, int extra_nodes, double tol) {
  const double top = max_of(r_dprimes);
  // The corrected value at the last anchor is ln(K + 2), so K + 1 >= e^top
  // puts every sample inside the exact node span.
  schedule.ensure_value_at_least(std::exp(top));
  const double r_max = schedule.fn().log_corrected(extra_nodes).inverse_or_zero(top);
  schedule.ensure_anchor_at_least(control.eval(r_max));
  const PiecewiseLinearFn c = schedule.fn();
  const double bound = std::log(3.0) + log_chord_error_bound(c, extra_nodes);
  return run_chain(control, c.log_corrected(extra_nodes), r_dprimes, bound, tol);
}

}  // namespace coarse
