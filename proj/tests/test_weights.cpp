#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <gfdm/errors.hpp>
#include <gfdm/weights.hpp>

#include "support/star_factory.hpp"

using namespace gfdm;

TEST_CASE("weight values at pinned points") {
  const double dmax = 1.0;
  SECTION("inverse-distance") {
    const WeightSpec spec{WeightKind::potential, 3.0};
    REQUIRE(weight(spec, 1.0, dmax) == 1.0);
    REQUIRE(weight(spec, 0.5, dmax) == 8.0);
  }
  SECTION("exponential approaches 1 from below as the distance vanishes") {
    const WeightSpec spec{WeightKind::exponential, 2.0};
    double prev = 0.0;
    for (double d : {0.5, 0.1, 0.01, 1e-4, 1e-8}) {
      const double w = weight(spec, d, dmax);
      REQUIRE(w > prev);
      REQUIRE(w < 1.0);
      prev = w;
    }
    REQUIRE(prev == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("cubic spline hits its knot values") {
    const WeightSpec spec{WeightKind::cubic_spline, 0.0};
    REQUIRE(weight(spec, dmax, dmax) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(weight(spec, 0.5 * dmax, dmax) == Catch::Approx(1.0 / 6.0).margin(1e-15));
    REQUIRE(weight(spec, 2.0, 1.0) == 0.0);  // beyond the support
  }
  SECTION("both spline branches agree at the interior knot") {
    // 2/3 - 4s^2 + 4s^3 and 4/3 - 4s + 4s^2 - (4/3)s^3, evaluated at s = 1/2.
    const double s = 0.5;
    const double near_branch = 2.0 / 3.0 - 4.0 * s * s + 4.0 * s * s * s;
    const double far_branch =
        4.0 / 3.0 - 4.0 * s + 4.0 * s * s - 4.0 / 3.0 * s * s * s;
    REQUIRE(std::abs(near_branch - far_branch) < 1e-12);
    const WeightSpec spec{WeightKind::cubic_spline, 0.0};
    REQUIRE(std::abs(weight(spec, 0.5, 1.0) - near_branch) < 1e-15);
  }
}

TEST_CASE("weights decrease with distance and stay positive inside the support") {
  const double dmax = 2.0;
  const std::vector<WeightSpec> specs = {
      {WeightKind::potential, 3.0},
      {WeightKind::potential, 1.5},
      {WeightKind::exponential, 2.0},
      {WeightKind::cubic_spline, 0.0},
  };
  for (const auto& spec : specs) {
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 40; ++k) {
      const double d = dmax * k / 40.0;
      const double w = weight(spec, d, dmax);
      if (k < 40) REQUIRE(w > 0.0);
      if (spec.kind == WeightKind::cubic_spline)
        REQUIRE(w <= prev);
      else
        REQUIRE(w < prev);
      prev = w;
    }
  }
}

TEST_CASE("weight argument validation") {
  REQUIRE_THROWS_AS(weight(WeightSpec{WeightKind::potential, 3.0}, 0.0, 1.0),
                    InvalidArgument);
  REQUIRE_THROWS_AS(weight(WeightSpec{WeightKind::potential, 0.0}, 0.5, 1.0),
                    InvalidArgument);
  REQUIRE_THROWS_AS(weight(WeightSpec{WeightKind::potential, -1.0}, 0.5, 1.0),
                    InvalidArgument);
  REQUIRE_THROWS_AS(weight(WeightSpec{WeightKind::exponential, 0.0}, 0.5, 1.0),
                    InvalidArgument);
  REQUIRE_THROWS_AS(weight(WeightSpec{WeightKind::cubic_spline, 0.0}, 0.5, 0.0),
                    InvalidArgument);
}

TEST_CASE("per-star weight vectors") {
  const auto star = testutil::synthetic_star(
      1, {std::array<double, 3>{-0.5, 0.0, 0.0}, std::array<double, 3>{0.5, 0.0, 0.0}});

  SECTION("inverse-distance at half spacing") {
    const auto w = star_weights(WeightSpec{WeightKind::potential, 3.0}, star);
    REQUIRE(w == std::vector<double>{8.0, 8.0});
  }
  SECTION("the spline zeroes exactly the farthest neighbor") {
    const auto star2 = testutil::synthetic_star(
        1, {std::array<double, 3>{-0.25, 0.0, 0.0}, std::array<double, 3>{0.5, 0.0, 0.0}});
    const auto w = star_weights(WeightSpec{WeightKind::cubic_spline, 0.0}, star2);
    REQUIRE(w.size() == 2);
    REQUIRE(w[0] > 0.0);
    REQUIRE(w[1] == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("all kinds give positive weights strictly inside the support") {
    const auto star3 = testutil::synthetic_star(
        2, {std::array<double, 3>{0.1, 0.0, 0.0}, std::array<double, 3>{0.0, 0.2, 0.0},
            std::array<double, 3>{-0.15, 0.1, 0.0}, std::array<double, 3>{0.1, -0.2, 0.0},
            std::array<double, 3>{0.25, 0.25, 0.0}});
    for (auto kind : {WeightKind::potential, WeightKind::exponential}) {
      const auto w = star_weights(WeightSpec{kind, 2.0}, star3);
      for (size_t i = 0; i < w.size(); ++i) REQUIRE(w[i] > 0.0);
    }
  }
}
