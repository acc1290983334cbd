#include "coarse/pl_function.hpp"

#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "coarse/io.hpp"
#include "support.hpp"

using namespace coarse;
using coarse::testing::doubling_rescaling;

TEST_CASE("construction rejects malformed input") {
  CHECK_THROWS_AS(PiecewiseLinearFn({}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinearFn({{1.0, 0.0}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinearFn({{0.0, 0.0}, {0.0, 1.0}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinearFn({{0.0, 2.0}, {1.0, 1.0}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseLinearFn({{0.0, 0.0}}, -1.0), std::invalid_argument);
}

TEST_CASE("eval interpolates and extends affinely") {
  const auto id = PiecewiseLinearFn::identity();
  CHECK(id.eval(0.0) == 0.0);
  CHECK(id.eval(5.0) == 5.0);

  const auto c = doubling_rescaling();
  CHECK(c.eval(2.0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(c.eval(11.0) == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(c.eval(15.0) == 4.0);
  CHECK(c.eval(31.0) == doctest::Approx(5.0).epsilon(1e-12));

  CHECK_THROWS_AS(id.eval(-0.5), std::domain_error);
}

TEST_CASE("inverse_or_zero returns the least preimage, extended by zero") {
  const auto id = PiecewiseLinearFn::identity();
  CHECK(id.inverse_or_zero(5.0) == 5.0);

  const auto c = doubling_rescaling();
  CHECK(c.inverse_or_zero(2.5) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(c.inverse_or_zero(0.0) == 0.0);

  // Value below the attainable range maps to 0.
  const PiecewiseLinearFn lifted({{0.0, 2.0}, {1.0, 3.0}}, 1.0);
  CHECK(lifted.inverse_or_zero(1.0) == 0.0);

  const PiecewiseLinearFn bounded({{0.0, 0.0}, {1.0, 1.0}}, 0.0);
  CHECK_THROWS_AS(bounded.inverse_or_zero(2.0), std::range_error);
}

TEST_CASE("inverse_or_zero undoes eval past flat segments") {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const auto f = coarse::testing::random_concave_fn(rng);
    for (double r = 0.0; r < 2.0 * f.last_x(); r += 0.37) {
      CHECK(f.inverse_or_zero(f.eval(r)) == doctest::Approx(r).epsilon(1e-9));
    }
  }
}

TEST_CASE("sup_preimage_le uses supremum semantics on flat runs") {
  const PiecewiseLinearFn flat({{0.0, 0.0}, {1.0, 1.0}, {3.0, 1.0}, {4.0, 2.0}}, 1.0);
  CHECK(flat.sup_preimage_le(1.0) == 3.0);
  CHECK(flat.sup_preimage_le(0.5) == 0.5);
  CHECK(flat.sup_preimage_le(2.0) == 4.0);
  CHECK(flat.sup_preimage_le(3.0) == 5.0);

  const PiecewiseLinearFn bounded({{0.0, 0.0}, {1.0, 1.0}}, 0.0);
  CHECK_THROWS_AS(bounded.sup_preimage_le(1.0), std::range_error);
}

TEST_CASE("analyze flags the kinked subadditive example") {
  // max(min(r, 1/2), r/2): subadditive but not concave.
  const PiecewiseLinearFn f({{0.0, 0.0}, {0.5, 0.5}, {1.0, 0.5}}, 0.5);
  const FnAnalysis a = analyze(f, 0.125);
  CHECK(a.is_nondecreasing);
  CHECK_FALSE(a.is_concave);
  CHECK(a.is_subadditive);
  CHECK_FALSE(a.witness.has_value());
}

TEST_CASE("analyze finds a witness for a convex function") {
  const PiecewiseLinearFn convex({{0.0, 0.0}, {1.0, 1.0}, {2.0, 4.0}}, 3.0);
  const FnAnalysis a = analyze(convex, 1.0);
  CHECK_FALSE(a.is_concave);
  CHECK_FALSE(a.is_subadditive);
  REQUIRE(a.witness.has_value());
  CHECK(a.witness->a == 1.0);
  CHECK(a.witness->b == 1.0);
  CHECK(convex.eval(a.witness->a + a.witness->b) >
        convex.eval(a.witness->a) + convex.eval(a.witness->b));
}

TEST_CASE("analyze accepts the canonical concave rescaling") {
  const FnAnalysis a = analyze(doubling_rescaling(), 0.5);
  CHECK(a.is_concave);
  CHECK(a.is_subadditive);
  CHECK(a.is_nondecreasing);
  CHECK(a.vanishes_only_at_zero);
  CHECK(a.is_unbounded);
}

TEST_CASE("analyze agrees with an independent grid oracle") {
  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    const auto f = coarse::testing::random_monotone_fn(rng);
    const double step = f.last_x() / 20.0;
    const FnAnalysis a = analyze(f, step);
    CHECK(a.is_subadditive == coarse::testing::subadditive_on_grid(f, step));
  }
}

TEST_CASE("concavity with zero only at zero forces subadditivity") {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto f = coarse::testing::random_concave_fn(rng);
    const FnAnalysis a = analyze(f, f.last_x() / 16.0);
    REQUIRE(a.is_concave);
    REQUIRE(a.vanishes_only_at_zero);
    CHECK(a.is_subadditive);
    CHECK(coarse::testing::subadditive_on_grid(f, f.last_x() / 16.0));
  }
}

TEST_CASE("log correction is exact at nodes and chordal between them") {
  const auto id = PiecewiseLinearFn::identity();

  const auto one_node = id.log_corrected(1);
  CHECK(one_node.eval(0.0) == 0.0);
  CHECK(one_node.eval(1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // Nodes at 1 and 3: the value at 2 is the chord midpoint.
  CHECK(one_node.eval(3.0) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(one_node.eval(2.0) ==
        doctest::Approx((std::log(2.0) + std::log(4.0)) / 2.0).epsilon(1e-12));
}

TEST_CASE("log correction stays below the exact curve and preserves concavity") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto f = coarse::testing::random_concave_fn(rng);
    const auto corrected = f.log_corrected(3);
    const double span = corrected.last_x();
    const double bound = log_chord_error_bound(f, 3);
    for (double x = 0.0; x <= span; x += span / 257.0) {
      const double exact = std::log1p(f.eval(x));
      CHECK(corrected.eval(x) <= exact + kTol);
      CHECK(corrected.eval(x) >= exact - bound - kTol);
    }
    CHECK(analyze(corrected, 1.0).is_concave);
  }
}

TEST_CASE("scaling multiplies values and keeps shape flags") {
  const auto id = PiecewiseLinearFn::identity();
  CHECK(id.scaled(1.0) == id);

  const auto c = doubling_rescaling();
  CHECK(c.scaled(0.5).eval(3.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(c.scaled(0.0), std::domain_error);
  CHECK_THROWS_AS(c.scaled(-2.0), std::domain_error);

  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto f = coarse::testing::random_concave_fn(rng);
    const auto scaled = f.scaled(rng.next_real(0.05, 4.0));
    const FnAnalysis a = analyze(scaled, 0.5);
    CHECK(a.is_concave);
    CHECK(a.is_subadditive);
  }
}

TEST_CASE("composition matches pointwise evaluation") {
  Rng rng(23);
  for (int i = 0; i < 50; ++i) {
    const auto inner = coarse::testing::random_monotone_fn(rng);
    const auto outer = coarse::testing::random_monotone_fn(rng);
    const auto composed = compose(outer, inner);
    const double span = 2.0 * composed.last_x() + 1.0;
    for (double x = 0.0; x <= span; x += span / 113.0) {
      CHECK(composed.eval(x) ==
            doctest::Approx(outer.eval(inner.eval(x))).epsilon(1e-9));
    }
  }
}

TEST_CASE("JSON round trip is faithful") {
  const auto c = doubling_rescaling();
  const auto back = pl_fn_from_json(to_json(c));
  CHECK(back == c);

  // Serializing twice yields identical bytes.
  CHECK(to_json(back).dump() == to_json(c).dump());

  // Decimal inputs with few significant digits survive exactly.
  const PiecewiseLinearFn f({{0.0, 0.25}, {1.5, 123456789.012}}, 0.125);
  CHECK(pl_fn_from_json(to_json(f)) == f);
}
