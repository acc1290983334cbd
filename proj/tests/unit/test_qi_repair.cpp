#include "coarse/qi_repair.hpp"

#include <cmath>

#include <doctest.h>

#include "coarse/fn_expr.hpp"
#include "support.hpp"

using namespace coarse;

namespace {

CoarseProfile sqrt_profile(long nodes) {
  return CoarseProfile{parse_fn("sqrt:" + std::to_string(nodes)),
                       parse_fn("sqrt:" + std::to_string(nodes))};
}

// phi plus a random nondecreasing surplus, so contraction <= dilation holds
// by construction and both stay unbounded.
CoarseProfile random_profile(Rng& rng) {
  const PiecewiseLinearFn phi = coarse::testing::random_concave_fn(rng);
  std::vector<Breakpoint> upper;
  double surplus = rng.next_real(0.0, 2.0);
  for (const auto& b : phi.breakpoints()) {
    upper.push_back({b.x, b.y + surplus});
    surplus += rng.next_real(0.0, 1.5);
  }
  return CoarseProfile{phi, PiecewiseLinearFn(std::move(upper), phi.tail_slope() + 0.5)};
}

}  // namespace

TEST_CASE("profile validation") {
  CHECK_NOTHROW(sqrt_profile(64).validate());

  const PiecewiseLinearFn bounded({{0.0, 0.0}, {1.0, 1.0}}, 0.0);
  CHECK_THROWS_AS((CoarseProfile{bounded, PiecewiseLinearFn::identity()}).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS((CoarseProfile{PiecewiseLinearFn::affine(2.0, 0.0),
                                 PiecewiseLinearFn::identity()})
                      .validate(),
                  std::invalid_argument);
}

TEST_CASE("interleaved schedules for the square-root profile") {
  auto pair = QISchedulePair::build(sqrt_profile(64), 4);
  CHECK(pair.domain_anchors() == std::vector<double>{1, 2, 4, 9, 16});
  CHECK(pair.codomain_anchors() == std::vector<double>{1, 2, 3, 4, 5});
}

TEST_CASE("the identity profile gives matching integer schedules") {
  auto pair = QISchedulePair::build({PiecewiseLinearFn::identity(), PiecewiseLinearFn::identity()}, 6);
  CHECK(pair.domain_anchors() == std::vector<double>{1, 2, 3, 4, 5, 6, 7});
  CHECK(pair.codomain_anchors() == pair.domain_anchors());
  const PiecewiseLinearFn cx = pair.domain_fn();
  for (double r = 0.0; r < 7.0; r += 0.41) {
    CHECK(cx.eval(r) == doctest::Approx(r).epsilon(1e-12));
  }
}

TEST_CASE("schedule interleaving inequalities hold for random profiles") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const CoarseProfile profile = random_profile(rng);
    auto pair = QISchedulePair::build(profile, 12);
    const auto& a = pair.domain_anchors();
    const auto& b = pair.codomain_anchors();

    for (std::size_t k = 2; k < a.size(); ++k) {
      // Above a_{k-1} the contraction has climbed past b_{k-2}; anchors grow
      // geometrically, so compare with a relative slack.
      for (double r = a[k - 1]; r <= a[k]; r += (a[k] - a[k - 1]) / 7.0) {
        CHECK(profile.contraction.eval(r) >= b[k - 2] * (1.0 - 1e-12) - kTol);
      }
      // ... and below a_k the dilation stays under b_k.
      CHECK(profile.dilation.eval(a[k]) <= b[k] * (1.0 + 1e-12) + kTol);
    }

    // Anchor spacings never shrink, so both rescalings are concave.
    for (std::size_t k = 1; k + 1 < a.size(); ++k) {
      CHECK(a[k + 1] - a[k] >= a[k] - a[k - 1] - kTol);
      CHECK(b[k + 1] - b[k] >= b[k] - b[k - 1] - kTol);
    }

    const FnAnalysis ax = analyze(pair.domain_fn(), 0.5);
    const FnAnalysis ay = analyze(pair.codomain_fn(), 0.5);
    for (const FnAnalysis& a_flags : {ax, ay}) {
      CHECK(a_flags.is_concave);
      CHECK(a_flags.is_subadditive);
      CHECK(a_flags.is_unbounded);
      CHECK(a_flags.vanishes_only_at_zero);
    }
  }
}

TEST_CASE("repaired identity map is an isometry up to (-2, +1)") {
  const long box = 200;
  CoarseProfile profile = sqrt_profile(2 * box);
  auto pair = QISchedulePair::build(profile, 1);
  pair.ensure_coverage(2.0 * box);

  const auto base = std::make_shared<LatticeSpace>(1, box);
  const SampledMap map{base, std::make_shared<TransformedSpace>(base, profile.contraction),
                       [](std::size_t i) { return i; }};

  const PairDiffStats stats = verify_qi_additive(map, pair, SamplePlan::exhaustive_plan());
  CHECK(stats.pairs_checked == 401 * 400 / 2);
  CHECK(stats.within(-2.0, 1.0));

  // The log correction is 1-Lipschitz, so the bounds survive it.
  const PiecewiseLinearFn cx = pair.domain_fn().log_corrected(2);
  const PiecewiseLinearFn cy = pair.codomain_fn().log_corrected(2);
  const PairDiffStats logged = verify_qi_additive(map, cx, cy, SamplePlan::exhaustive_plan());
  CHECK(logged.within(-2.0, 1.0));

  // Scaling both rescalings scales the additive constants.
  const PairDiffStats scaled =
      verify_qi_additive(map, cx.scaled(0.1), cy.scaled(0.1), SamplePlan::exhaustive_plan());
  CHECK(scaled.within(-0.2, 0.1));
  CHECK(scaled.min_diff == doctest::Approx(0.1 * logged.min_diff).epsilon(1e-9));
  CHECK(scaled.max_diff == doctest::Approx(0.1 * logged.max_diff).epsilon(1e-9));
}

TEST_CASE("identity profile on equal metrics stays within the bounds trivially") {
  const auto base = std::make_shared<LatticeSpace>(1, 50);
  auto pair = QISchedulePair::build({PiecewiseLinearFn::identity(), PiecewiseLinearFn::identity()}, 1);
  pair.ensure_coverage(100.0);
  const SampledMap map{base, base, [](std::size_t i) { return i; }};
  const PairDiffStats stats = verify_qi_additive(map, pair, SamplePlan::exhaustive_plan());
  CHECK(stats.min_diff == 0.0);
  CHECK(stats.max_diff == 0.0);
}

TEST_CASE("large-scale Lipschitz schedule for the quadratic dilation") {
  const PiecewiseLinearFn square = parse_fn("sq:64");
  const PiecewiseLinearFn cy = build_lsl_schedule(square, 8);

  // Anchors land on the squares.
  CHECK(cy.inverse_or_zero(1.0) == 1.0);
  CHECK(cy.inverse_or_zero(2.0) == 4.0);
  CHECK(cy.inverse_or_zero(3.0) == 9.0);
  CHECK(cy.inverse_or_zero(4.0) == 16.0);

  // Hand interpolation between (4, 2) and (9, 3).
  CHECK(cy.eval(6.25) == doctest::Approx(2.45).epsilon(1e-12));

  // The composed map stays within slope 1 and additive constant 1.
  for (double r = 0.0; r <= 8.0; r += 0.01) {
    CHECK(cy.eval(square.eval(r)) <= r + 1.0 + kTol);
  }
}

TEST_CASE("identity dilation keeps the rescaling under r + 1") {
  const PiecewiseLinearFn cy = build_lsl_schedule(PiecewiseLinearFn::identity(), 30);
  for (double r = 0.0; r <= 30.0; r += 0.13) {
    CHECK(cy.eval(r) <= r + 1.0 + kTol);
  }
}

TEST_CASE("random superlinear dilations sweep under the Lipschitz bound") {
  Rng rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const PiecewiseLinearFn dilation = coarse::testing::random_superlinear_fn(rng);
    const PiecewiseLinearFn cy = build_lsl_schedule(dilation, 51);
    double max_excess = 0.0;
    for (double r = 0.0; r <= 50.0; r += 0.05) {
      max_excess = std::max(max_excess, cy.eval(dilation.eval(r)) - r);
    }
    CAPTURE(trial);
    CHECK(max_excess <= 1.0 + kTol);
  }
}

TEST_CASE("bounded dilation is rejected") {
  const PiecewiseLinearFn bounded({{0.0, 0.0}, {1.0, 1.0}}, 0.0);
  CHECK_THROWS_AS(build_lsl_schedule(bounded, 5), std::invalid_argument);
}
