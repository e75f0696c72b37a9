// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "fairdet/curve.hpp"
#include "fairdet/det.hpp"
#include "fairdet/error.hpp"
#include "fairdet/probit.hpp"

using namespace fairdet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("probit hits published standard-normal quantiles") {
  CHECK(probit(0.5) == 0.0);
  CHECK_THAT(probit(0.975), WithinAbs(1.959964, 1e-6));
  CHECK_THAT(probit(0.0228), WithinAbs(-1.9991, 1e-3));

  // Textbook quantiles, 15 significant digits.
  CHECK_THAT(probit(0.975), WithinRel(1.959963984540054, 1e-12));
  CHECK_THAT(probit(0.025), WithinRel(-1.959963984540054, 1e-12));
  CHECK_THAT(probit(0.841344746068543), WithinRel(1.0, 1e-9));
  CHECK_THAT(probit(0.158655253931457), WithinRel(-1.0, 1e-9));
  CHECK_THAT(probit(0.99865010196837), WithinRel(3.0, 1e-9));
  CHECK_THAT(probit(1e-10), WithinRel(-6.361340902404056, 1e-9));

  SECTION("round trip through the normal CDF") {
    for (double p : {1e-9, 1e-4, 0.0228, 0.3, 0.5, 0.7, 0.975, 1.0 - 1e-6}) {
      CHECK_THAT(normal_cdf(probit(p)), WithinRel(p, 1e-9));
    }
  }
}

TEST_CASE("probit rejects values outside the open unit interval") {
  CHECK_THROWS_AS(probit(0.0), DataError);
  CHECK_THROWS_AS(probit(1.0), DataError);
  CHECK_THROWS_AS(probit(-0.25), DataError);
  CHECK_THROWS_AS(probit(1.25), DataError);
  CHECK_THROWS_AS(probit(std::nan("")), DataError);
}

TEST_CASE("probit is strictly increasing") {
  double prev = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < 2000; ++i) {
    const double p = static_cast<double>(i) / 2000.0;
    const double x = probit(p);
    REQUIRE(x > prev);
    prev = x;
  }
}

TEST_CASE("probit is antisymmetric about one half") {
  // For each probe, (p, q) is built so that q == 1 - p holds *exactly* in
  // double arithmetic (q = fl(1-p0), then p = 1-q, which is exact for
  // q >= 0.5). Testing with a naive fl(1-p) instead would measure the
  // rounding of the subtraction, not the symmetry of the function.
  std::vector<double> probes;
  for (double p0 = 1e-10; p0 < 0.5; p0 *= 3.7) probes.push_back(p0);
  for (double p0 : {0.1, 0.25, 0.4, 0.49, 0.4999}) probes.push_back(p0);

  for (double p0 : probes) {
    const double q = 1.0 - p0;   // rounds; q >= 0.5
    const double p = 1.0 - q;    // exact by Sterbenz: p and q sum to 1 exactly
    const double lo = probit(p);
    const double hi = probit(q);
    INFO("p = " << p);
    CHECK(std::abs(hi + lo) <= 1e-12 * std::max(1.0, std::abs(lo)));
  }
}

TEST_CASE("zero and one rates are clamped by the half-count rule") {
  CHECK(clamp_rate(0.0, 100) == 0.005);
  CHECK(clamp_rate(1.0, 100) == 0.995);
  CHECK(clamp_rate(0.3, 100) == 0.3);
  CHECK(clamp_rate(0.0, 1) == 0.5);
  CHECK(clamp_rate(1.0, 1) == 0.5);

  SECTION("clamping preserves the ordering of distinct rates") {
    const std::size_t n = 50;  // clamp floor 0.01, ceiling 0.99
    double prev = -1.0;
    for (double r : {0.0, 0.02, 0.3, 0.98, 1.0}) {
      const double c = clamp_rate(r, n);
      REQUIRE(c > prev);
      prev = c;
    }
  }
}

TEST_CASE("DET points are probit-transformed operating points") {
  SECTION("the even point maps to the origin") {
    // targets {0,1}, nontargets {0,1}: at theta=1 both rates are 0.5.
    const std::vector<double> t{0.0, 1.0}, n{0.0, 1.0};
    const ErrorCurve c = compute_error_curve(t, n);
    const DetCurvePoints det = det_curve_points(c, {});
    bool found_origin = false;
    for (const auto& pt : det.points)
      if (pt.x == 0.0 && pt.y == 0.0) found_origin = true;
    CHECK(found_origin);
  }

  SECTION("zero/one endpoints are clamped to finite coordinates") {
    const std::vector<double> t{2.0, 1.0, -0.5}, n{-2.0, -1.0, 0.5};
    const ErrorCurve c = compute_error_curve(t, n);
    const DetCurvePoints det = det_curve_points(c, {});
    REQUIRE_FALSE(det.points.empty());
    for (const auto& pt : det.points) {
      REQUIRE(std::isfinite(pt.x));
      REQUIRE(std::isfinite(pt.y));
    }
  }

  SECTION("x is strictly increasing after collapsing duplicate FPR runs") {
    const std::vector<double> t{2.0, 1.0, -0.5, 0.3, 0.9}, n{-2.0, -1.0, 0.5, 0.5, 1.5};
    const ErrorCurve c = compute_error_curve(t, n);
    const DetCurvePoints det = det_curve_points(c, {});
    for (std::size_t i = 1; i < det.points.size(); ++i)
      REQUIRE(det.points[i - 1].x < det.points[i].x);
  }

  SECTION("markers carry their kind, raw rates, and a percent label") {
    const std::vector<double> t{2.0, 1.0, -0.5}, n{-2.0, -1.0, 0.5};
    const ErrorCurve c = compute_error_curve(t, n);
    std::vector<MarkerRequest> req;
    req.push_back({MarkerKind::kOverallMinCost, 0.1036, 0.0027, 1.0});
    const DetCurvePoints det = det_curve_points(c, req);
    REQUIRE(det.markers.size() == 1);
    CHECK(det.markers[0].kind == MarkerKind::kOverallMinCost);
    CHECK(det.markers[0].fnr == 0.1036);
    CHECK(det.markers[0].fpr == 0.0027);
    CHECK(det.markers[0].label == "FPR 0.27%, FNR 10.36%");
    CHECK_THAT(det.markers[0].x, WithinRel(probit(0.0027), 1e-12));
    CHECK_THAT(det.markers[0].y, WithinRel(probit(0.1036), 1e-12));
  }
}

TEST_CASE("percent formatting keeps two decimals") {
  CHECK(format_rate_percent(0.0027) == "0.27%");
  CHECK(format_rate_percent(0.1036) == "10.36%");
  CHECK(format_rate_percent(1.0) == "100.00%");
  CHECK(format_rate_percent(0.0) == "0.00%");
}

TEST_CASE("DET axis ticks cover the standard percent points") {
  const auto& ticks = det_axis_ticks();
  const std::vector<double> want{0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.4};
  CHECK(ticks == want);
}
