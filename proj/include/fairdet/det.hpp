// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// DET-plot geometry: error curves mapped onto normal-deviate axes, plus
// annotated operating-point markers.

#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "fairdet/curve.hpp"
#include "fairdet/probit.hpp"

namespace fairdet {

// Kinds of operating-point markers drawn on a DET curve. Rendering assigns
// a fixed symbol per kind: triangle (min cost at the overall threshold),
// cross (min cost at the subgroup's own threshold), circle (EER).
enum class MarkerKind {
  kOverallMinCost,
  kSubgroupMinCost,
  kEqualError,
};

// An operating point to mark, specified by its raw error rates. threshold is
// carried through for labeling/debugging only.
struct MarkerRequest {
  MarkerKind kind = MarkerKind::kEqualError;
  double fnr = 0.0;
  double fpr = 0.0;
  double threshold = 0.0;
};

struct DetPoint {
  double x = 0.0;  // probit of (clamped) FPR
  double y = 0.0;  // probit of (clamped) FNR
};

struct DetMarker {
  MarkerKind kind = MarkerKind::kEqualError;
  double x = 0.0;
  double y = 0.0;
  double fnr = 0.0;   // raw (unclamped) rates
  double fpr = 0.0;
  std::string label;  // e.g. "FPR 0.27%, FNR 10.36%"
};

struct DetCurvePoints {
  std::vector<DetPoint> points;  // x strictly increasing
  std::vector<DetMarker> markers;
};

// "0.27%" -- two decimals of the rate expressed in percent.
inline std::string format_rate_percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", rate * 100.0);
  return buf;
}

// Maps an error curve onto normal-deviate axes. Boundary rates are pulled
// inside (0,1) with clamp_rate before the probit, so the sentinels survive.
// Candidates sharing an FPR collapse to one plotted point (the one with the
// smallest FNR -- the first in threshold order); the result is emitted with
// x strictly increasing.
inline DetCurvePoints det_curve_points(const ErrorCurve& curve,
                                       const std::vector<MarkerRequest>& requests = {}) {
  DetCurvePoints out;
  out.points.reserve(curve.size());

  // Walk in threshold order (FPR nonincreasing, FNR nondecreasing) and keep
  // the first point of every equal-FPR run.
  double prev_fpr = -1.0;
  bool have_prev = false;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (have_prev && curve.fpr[i] == prev_fpr) continue;
    prev_fpr = curve.fpr[i];
    have_prev = true;
    DetPoint p;
    p.x = probit(clamp_rate(curve.fpr[i], curve.n_nontarget));
    p.y = probit(clamp_rate(curve.fnr[i], curve.n_target));
    out.points.push_back(p);
  }
  // Threshold order gave decreasing x; flip to increasing.
  std::reverse(out.points.begin(), out.points.end());

  out.markers.reserve(requests.size());
  for (const auto& r : requests) {
    DetMarker m;
    m.kind = r.kind;
    m.fnr = r.fnr;
    m.fpr = r.fpr;
    m.x = probit(clamp_rate(r.fpr, curve.n_nontarget));
    m.y = probit(clamp_rate(r.fnr, curve.n_target));
    m.label = "FPR " + format_rate_percent(r.fpr) + ", FNR " + format_rate_percent(r.fnr);
    out.markers.push_back(m);
  }
  return out;
}

// Conventional DET axis ticks, as rates: 0.1% .. 40%.
inline const std::vector<double>& det_axis_ticks() {
  static const std::vector<double> ticks = {0.001, 0.005, 0.01, 0.02,
                                            0.05,  0.1,   0.2,  0.4};
  return ticks;
}

}  // namespace fairdet
