// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Error tradeoff curve over the exhaustive set of decision thresholds, plus
// the operating points derived from it (minimum detection cost, EER, cost at
// an arbitrary threshold).
//
// Decision rule: a trial is ACCEPTED iff score >= theta. Consequently
//   FNR(theta) = #{target scores  <  theta} / n_target
//   FPR(theta) = #{nontarget scores >= theta} / n_nontarget
// Both rates are step functions of theta that only change at observed score
// values, and are constant on each half-open interval (s_i, s_{i+1}]. The
// candidate threshold set -- every distinct score plus a -inf and +inf
// sentinel -- therefore realizes every operating point the system can reach.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "fairdet/cost.hpp"
#include "fairdet/error.hpp"

namespace fairdet {

struct ErrorCurve {
  // Candidate thresholds in strictly increasing order. thresholds.front() is
  // -inf (accept everything: FNR 0, FPR 1) and thresholds.back() is +inf
  // (reject everything: FNR 1, FPR 0).
  std::vector<double> thresholds;
  std::vector<double> fnr;
  std::vector<double> fpr;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;

  std::size_t size() const { return thresholds.size(); }

  // Index of the candidate whose rates apply at an arbitrary theta: the
  // smallest candidate >= theta. Rates are constant on (s_i, s_{i+1}], so
  // any theta in that interval shares the operating point of s_{i+1}.
  std::size_t index_at(double theta) const {
    auto it = std::lower_bound(thresholds.begin(), thresholds.end(), theta);
    return static_cast<std::size_t>(it - thresholds.begin());
  }

  struct Rates {
    double fnr;
    double fpr;
  };

  Rates rates_at(double theta) const {
    const std::size_t i = index_at(theta);
    return {fnr[i], fpr[i]};
  }
};

// Builds the exhaustive error curve from raw scores. Throws DataError when
// either class is empty or any score is non-finite.
inline ErrorCurve compute_error_curve(std::span<const double> target_scores,
                                      std::span<const double> nontarget_scores) {
  if (target_scores.empty())
    throw DataError("error curve: no target trials");
  if (nontarget_scores.empty())
    throw DataError("error curve: no nontarget trials");

  std::vector<double> tgt(target_scores.begin(), target_scores.end());
  std::vector<double> non(nontarget_scores.begin(), nontarget_scores.end());
  for (double s : tgt)
    if (!std::isfinite(s)) throw DataError("error curve: non-finite target score");
  for (double s : non)
    if (!std::isfinite(s)) throw DataError("error curve: non-finite nontarget score");

  std::sort(tgt.begin(), tgt.end());
  std::sort(non.begin(), non.end());

  // Distinct scores, ascending.
  std::vector<double> distinct;
  distinct.reserve(tgt.size() + non.size());
  std::merge(tgt.begin(), tgt.end(), non.begin(), non.end(),
             std::back_inserter(distinct));
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  const double nt = static_cast<double>(tgt.size());
  const double nn = static_cast<double>(non.size());
  const double inf = std::numeric_limits<double>::infinity();

  ErrorCurve c;
  c.n_target = tgt.size();
  c.n_nontarget = non.size();
  c.thresholds.reserve(distinct.size() + 2);
  c.fnr.reserve(distinct.size() + 2);
  c.fpr.reserve(distinct.size() + 2);

  c.thresholds.push_back(-inf);
  c.fnr.push_back(0.0);
  c.fpr.push_back(1.0);

  // Single ascending walk: pt / pu track how many scores are < the current
  // threshold in each class.
  std::size_t pt = 0, pu = 0;
  for (double s : distinct) {
    while (pt < tgt.size() && tgt[pt] < s) ++pt;
    while (pu < non.size() && non[pu] < s) ++pu;
    c.thresholds.push_back(s);
    c.fnr.push_back(static_cast<double>(pt) / nt);
    c.fpr.push_back(static_cast<double>(non.size() - pu) / nn);
  }

  c.thresholds.push_back(inf);
  c.fnr.push_back(1.0);
  c.fpr.push_back(0.0);
  return c;
}

struct MinCost {
  double threshold = 0.0;  // may be +/-inf (a trivial accept/reject-all optimum)
  double cost = 0.0;
  std::size_t index = 0;   // candidate index into the curve
};

// Scans every candidate; ties keep the earliest (lowest-threshold) candidate.
inline MinCost min_detection_cost(const ErrorCurve& curve, const CostParams& params) {
  params.validate();
  MinCost best;
  best.index = 0;
  best.threshold = curve.thresholds[0];
  best.cost = detection_cost(curve.fnr[0], curve.fpr[0], params);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const double cost = detection_cost(curve.fnr[i], curve.fpr[i], params);
    if (cost < best.cost) {
      best.cost = cost;
      best.index = i;
      best.threshold = curve.thresholds[i];
    }
  }
  return best;
}

// Detection cost of operating the system at an arbitrary fixed theta,
// evaluated by exact counting (i.e. at the candidate theta snaps to).
inline double cost_at_threshold(const ErrorCurve& curve, double theta,
                                const CostParams& params) {
  params.validate();
  const auto r = curve.rates_at(theta);
  return detection_cost(r.fnr, r.fpr, params);
}

struct EerPoint {
  double eer = 0.0;
  // Candidate threshold nearest the crossing (smaller |FNR-FPR| of the two
  // bracketing candidates; tie prefers the later one). Sentinels are eligible
  // when the crossing brackets one (possible only with heavily tied scores).
  double threshold = 0.0;
};

// Equal error rate. FNR-FPR rises from -1 at -inf to +1 at +inf and changes
// only at finite candidates, so a first index with FNR >= FPR always exists.
// Exact equality at that index is the EER; otherwise the crossing is linearly
// interpolated between the bracketing operating points in (FPR, FNR) space.
inline EerPoint equal_error_rate(const ErrorCurve& curve) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve.fnr[i] < curve.fpr[i]) continue;
    if (curve.fnr[i] == curve.fpr[i])
      return {curve.fnr[i], curve.thresholds[i]};
    // First crossing with strict inequality; i >= 1 because FNR(-inf)=0 < 1.
    const double x0 = curve.fpr[i - 1], y0 = curve.fnr[i - 1];
    const double x1 = curve.fpr[i], y1 = curve.fnr[i];
    const double d0 = x0 - y0;  // > 0 (still below the diagonal)
    const double d1 = y1 - x1;  // > 0 (strictly above at i)
    const double t = d0 / (d0 + d1);
    EerPoint p;
    p.eer = (1.0 - t) * x0 + t * x1;
    p.threshold = (d1 <= d0) ? curve.thresholds[i] : curve.thresholds[i - 1];
    return p;
  }
  throw DataError("equal error rate: no crossing found (malformed curve)");
}

}  // namespace fairdet
