#include "coarse/flattening.hpp"

#include <cmath>

#include <doctest.h>

#include "coarse/io.hpp"
#include "support.hpp"

using namespace coarse;

namespace {

std::vector<double> grid(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i <= count; ++i) {
    out.push_back(lo + (hi - lo) * static_cast<double>(i) / count);
  }
  return out;
}

}  // namespace

TEST_CASE("schedule recursion for an affine control") {
  auto schedule = FlatteningSchedule::build(PiecewiseLinearFn::affine(2.0, 1.0), 5);
  const std::vector<double> expected{1, 3, 7, 15, 31, 63};
  CHECK(schedule.anchors() == expected);

  const PiecewiseLinearFn c = schedule.fn();
  CHECK(c.eval(1.0) == 1.0);
  CHECK(c.eval(3.0) == 2.0);
  CHECK(c.eval(15.0) == 4.0);

  const FnAnalysis a = analyze(c, 0.5);
  CHECK(a.is_concave);
  CHECK(a.is_nondecreasing);
  CHECK(a.is_unbounded);
  CHECK(a.vanishes_only_at_zero);
}

TEST_CASE("trivial control collapses to the identity") {
  auto schedule = FlatteningSchedule::build(PiecewiseLinearFn::identity(), 6);
  const std::vector<double> expected{1, 2, 3, 4, 5, 6, 7};
  CHECK(schedule.anchors() == expected);
  const PiecewiseLinearFn c = schedule.fn();
  for (double r = 0.0; r <= 7.0; r += 0.31) {
    CHECK(c.eval(r) == doctest::Approx(r).epsilon(1e-12));
  }
}

TEST_CASE("geometric control dominates the concavity guard") {
  auto schedule = FlatteningSchedule::build(PiecewiseLinearFn::affine(6.0, 0.0), 3);
  CHECK(schedule.anchors() == std::vector<double>{1, 6, 36, 216});
}

TEST_CASE("multi-control schedules take the pointwise max") {
  auto single = FlatteningSchedule::build_multi({PiecewiseLinearFn::affine(2.0, 1.0)}, 4);
  CHECK(single.anchors() == std::vector<double>{1, 3, 7, 15, 31});

  auto bricks = FlatteningSchedule::build_multi({PiecewiseLinearFn::affine(6.0, 0.0),
                                                 PiecewiseLinearFn::affine(4.0, 0.0),
                                                 PiecewiseLinearFn::affine(4.0, 0.0)},
                                                2);
  CHECK(bricks.anchors() == std::vector<double>{1, 6, 36});

  auto mixed = FlatteningSchedule::build_multi(
      {PiecewiseLinearFn::affine(2.0, 1.0), PiecewiseLinearFn::affine(3.0, 0.0)}, 2);
  CHECK(mixed.anchors() == std::vector<double>{1, 3, 9});

  CHECK_THROWS_AS(FlatteningSchedule::build_multi({}, 3), std::invalid_argument);
}

TEST_CASE("anchor spacing never shrinks") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const auto control = coarse::testing::random_superlinear_fn(rng);
    auto schedule = FlatteningSchedule::build(control, 20);
    const auto& a = schedule.anchors();
    double gap = a[0];
    for (std::size_t k = 1; k < a.size(); ++k) {
      const double next_gap = a[k] - a[k - 1];
      CHECK(next_gap >= gap - kTol);
      CHECK(a[k] >= control.eval(a[k - 1]) - kTol);
      gap = next_gap;
    }
  }
}

TEST_CASE("affine bound transport keeps the slope and rescales the intercept") {
  const auto c = coarse::testing::doubling_rescaling();
  const AffineBound moved = transformed_control_bound({2.0, 3.0}, c);
  CHECK(moved.slope == 2.0);
  CHECK(moved.intercept == doctest::Approx(2.0).epsilon(1e-12));

  const AffineBound fixed = transformed_control_bound({1.0, 0.0}, c);
  CHECK(fixed.slope == 1.0);
  CHECK(fixed.intercept == 0.0);
  CHECK(transformed_control_bound({6.0, 0.0}, c).intercept == 0.0);

  CHECK_THROWS_AS(transformed_control_bound({0.5, 0.0}, c), std::invalid_argument);
  const PiecewiseLinearFn convex({{0.0, 0.0}, {1.0, 1.0}, {2.0, 4.0}}, 3.0);
  CHECK_THROWS_AS(transformed_control_bound({2.0, 1.0}, convex), std::invalid_argument);
}

TEST_CASE("transported bound majorizes the measured control for affine inputs") {
  const PiecewiseLinearFn control = PiecewiseLinearFn::affine(3.0, 2.0);
  auto schedule = FlatteningSchedule::build(control, 10);
  const AffineBound moved = transformed_control_bound({3.0, 2.0}, schedule.fn());
  const FlattenReport report = verify_flattening(schedule, control, grid(0.1, 8.0, 500));
  for (const auto& row : report.rows) {
    CHECK(row.transported <= moved.slope * row.r_prime + moved.intercept + kTol);
  }
}

TEST_CASE("transported control chain at a hand-computed point") {
  const PiecewiseLinearFn control = PiecewiseLinearFn::affine(2.0, 1.0);
  auto schedule = FlatteningSchedule::build(control, 4);
  const std::vector<double> samples{2.5};
  const FlattenReport report = verify_flattening(schedule, control, samples);
  REQUIRE(report.rows.size() == 1);
  // inverse(2.5) = 5, control -> 11, rescaled -> 3.5.
  CHECK(report.rows[0].transported == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(report.rows[0].excess == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.pass);
}

TEST_CASE("excess stays within 2 across the sampled range") {
  const PiecewiseLinearFn control = PiecewiseLinearFn::affine(2.0, 1.0);
  auto schedule = FlatteningSchedule::build(control, 1);
  auto samples = grid(1e-6, 12.0, 4000);
  // Push extra probes just above the integer images where the bound peaks.
  for (int k = 1; k <= 11; ++k) samples.push_back(static_cast<double>(k) + 1e-9);
  const FlattenReport report = verify_flattening(schedule, control, samples);
  CHECK(report.pass);
  CHECK(report.max_excess <= 2.0 + kTol);
}

TEST_CASE("a steep control step drives the excess toward 2") {
  // Flat at 100 until r = 1, then a sharp climb to 10000: entering the
  // second anchor interval transports all the way to the fourth level.
  const PiecewiseLinearFn control({{0.0, 100.0}, {1.0, 100.0}, {1.001, 10000.0}}, 1.0);
  auto schedule = FlatteningSchedule::build(control, 3);
  const FlattenReport report = verify_flattening(schedule, control, grid(1.0 + 1e-6, 2.0, 2000));
  CHECK(report.pass);
  CHECK(report.max_excess > 1.9);
  CHECK(report.max_excess <= 2.0 + kTol);
}

TEST_CASE("excess bound holds for randomized superlinear controls") {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const auto control = coarse::testing::random_superlinear_fn(rng);
    auto schedule = FlatteningSchedule::build(control, 1);
    const FlattenReport report = verify_flattening(schedule, control, grid(1e-4, 20.0, 2000));
    CAPTURE(trial);
    CHECK(report.pass);
  }
}

TEST_CASE("post-log control stays within ln 3 plus the chord error") {
  const PiecewiseLinearFn control = PiecewiseLinearFn::affine(2.0, 1.0);
  auto schedule = FlatteningSchedule::build(control, 1);
  const FlattenReport report = verify_log_control(schedule, control, grid(1e-4, 2.0, 500));
  CHECK(report.bound >= std::log(3.0));
  CHECK(report.bound <= std::log(3.0) + 0.2);
  CHECK(report.pass);

  // The sample at r'' = ln 2 lands at excess ln 3 - ln 2 by hand.
  const std::vector<double> pinned{std::log(2.0)};
  const FlattenReport hand = verify_log_control(schedule, control, pinned);
  CHECK(hand.rows[0].excess ==
        doctest::Approx(std::log(3.0) - std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("schedules serialize with anchors and the rescaling") {
  auto schedule = FlatteningSchedule::build(PiecewiseLinearFn::affine(2.0, 1.0), 4, "affine:2,1");
  const nlohmann::json j = to_json(schedule);
  CHECK(j.at("a").size() == 5);
  CHECK(j.at("a")[2].get<double>() == 7.0);
  CHECK(j.at("source").get<std::string>() == "affine:2,1");
  const PiecewiseLinearFn c = pl_fn_from_json(j.at("c"));
  CHECK(c.eval(7.0) == 3.0);
}
