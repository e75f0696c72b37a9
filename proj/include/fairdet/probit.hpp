// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Inverse standard-normal CDF (probit), used for the normal-deviate axes of
// DET plots. Acklam's rational approximation gives ~1.15e-9 relative error;
// one Halley step against the exact CDF (via std::erfc) pushes the result to
// full double precision.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "fairdet/error.hpp"

namespace fairdet {

// Standard normal CDF, accurate in both tails.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace detail {

// Acklam's rational approximation for p in (0, 0.5]; callers reflect the
// upper half. Valid only inside that range.
inline double probit_acklam_lower(double p) {
  static constexpr double a[6] = {
      -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[6] = {
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

// probit(p) = Phi^-1(p). Domain (0, 1) exclusive; throws DataError outside.
// probit(0.5) is exactly 0, and probit(1-p) == -probit(p) exactly: the upper
// half is evaluated by reflection, and 1-p introduces no rounding when
// p >= 0.5.
inline double probit(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw DataError("probit: p must lie strictly inside (0, 1), got " +
                    std::to_string(p));
  if (p == 0.5) return 0.0;
  if (p > 0.5) return -probit(1.0 - p);

  double x = detail::probit_acklam_lower(p);
  // Halley refinement: u = (Phi(x) - p) * sqrt(2*pi) * exp(x^2/2). Skipped
  // when exp(x^2/2) would overflow (|x| > ~37, beyond any representable p).
  const double half_x2 = 0.5 * x * x;
  if (half_x2 < 700.0) {
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(half_x2);
    x = x - u / (1.0 + x * u / 2.0);
  }
  return x;
}

// Pulls boundary rates off 0 and 1 so they stay inside probit's domain:
// 0 -> 1/(2n), 1 -> 1 - 1/(2n), everything else unchanged. n is the trial
// count behind the rate.
inline double clamp_rate(double rate, std::size_t n) {
  if (n == 0) throw DataError("clamp_rate: trial count must be positive");
  const double half = 1.0 / (2.0 * static_cast<double>(n));
  if (rate == 0.0) return half;
  if (rate == 1.0) return 1.0 - half;
  return rate;
}

}  // namespace fairdet
