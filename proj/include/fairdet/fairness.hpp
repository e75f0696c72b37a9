// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Subgroup fairness metrics on top of the error-curve layer:
//
//   ratio_overall_min  subgroup cost at the pooled optimal threshold, divided
//                      by the pooled cost there (> 1: subgroup fares worse
//                      than average).
//   ratio_sg_min       subgroup's own minimum cost divided by its cost at the
//                      pooled threshold (< 1: subgroup-specific tuning would
//                      help). Never exceeds 1: a minimum is a minimum.
//   fpr/fnr ratios     subgroup rate over pooled rate at the pooled optimum.
//   fairness index     aggregate of the ratio_overall_min values above 1;
//                      0 means no subgroup is worse than the pooled average.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairdet/cost.hpp"
#include "fairdet/curve.hpp"
#include "fairdet/error.hpp"
#include "fairdet/trial.hpp"

namespace fairdet {

// Two readings of the index aggregation; both are always computed and carried
// in reports, the mode only selects the headline value. They differ by
// exactly the number of contributing subgroups:
//   literal       = sum of (r - 1) over ratios r > 1
//   sum_of_ratios = sum of r over ratios r > 1
enum class IndexMode { kLiteral, kSumOfRatios };

inline std::string to_string(IndexMode m) {
  return m == IndexMode::kLiteral ? "literal" : "sum-of-ratios";
}

inline IndexMode index_mode_from_string(const std::string& s) {
  if (s == "literal") return IndexMode::kLiteral;
  if (s == "sum-of-ratios" || s == "sum_of_ratios") return IndexMode::kSumOfRatios;
  throw UsageError("unknown index mode '" + s + "' (expected literal or sum-of-ratios)");
}

struct FairnessIndexPair {
  double literal = 0.0;
  double sum_of_ratios = 0.0;
  std::size_t contributing = 0;  // subgroups with ratio > 1

  double value(IndexMode mode) const {
    return mode == IndexMode::kLiteral ? literal : sum_of_ratios;
  }

  bool operator==(const FairnessIndexPair&) const = default;
};

// Aggregates ratio_overall_min values. Contributing ratios are sorted before
// summation, making the result independent of subgroup order; `literal` is
// derived as sum - count so the pair's defining identity holds exactly.
inline FairnessIndexPair fairness_index_pair(std::span<const double> ratios) {
  std::vector<double> above;
  for (double r : ratios) {
    if (!(r >= 0.0))
      throw DataError("fairness index: ratios must be nonnegative, got " +
                      std::to_string(r));
    if (r > 1.0) above.push_back(r);
  }
  std::sort(above.begin(), above.end());
  FairnessIndexPair out;
  out.contributing = above.size();
  for (double r : above) out.sum_of_ratios += r;
  out.literal = out.sum_of_ratios - static_cast<double>(above.size());
  return out;
}

inline double fairness_index(std::span<const double> ratios, IndexMode mode) {
  return fairness_index_pair(ratios).value(mode);
}

// Cost-based comparison of one subgroup against the pooled population.
struct CdetEvaluation {
  double cdet_at_overall_min = 0.0;  // subgroup cost at the pooled optimum
  double cdet_at_sg_min = 0.0;       // subgroup cost at its own optimum
  double ratio_overall_min = 0.0;
  double ratio_sg_min = 0.0;
  double sg_min_threshold = 0.0;     // where the subgroup's own optimum sits
};

inline CdetEvaluation subgroup_cdet_evaluation(const ErrorCurve& overall,
                                               const ErrorCurve& subgroup,
                                               const CostParams& params) {
  const MinCost overall_min = min_detection_cost(overall, params);
  const MinCost sg_min = min_detection_cost(subgroup, params);

  CdetEvaluation e;
  e.cdet_at_overall_min = cost_at_threshold(subgroup, overall_min.threshold, params);
  e.cdet_at_sg_min = sg_min.cost;
  e.sg_min_threshold = sg_min.threshold;

  if (!(overall_min.cost > 0.0))
    throw DataError(
        "subgroup evaluation: pooled minimum cost is zero; the cost ratio at the "
        "pooled optimum is undefined");
  e.ratio_overall_min = e.cdet_at_overall_min / overall_min.cost;

  if (e.cdet_at_overall_min > 0.0) {
    e.ratio_sg_min = e.cdet_at_sg_min / e.cdet_at_overall_min;
  } else if (e.cdet_at_sg_min == 0.0) {
    e.ratio_sg_min = 1.0;  // 0/0: the subgroup is already perfect at the pooled point
  } else {
    throw DataError(
        "subgroup evaluation: zero cost at the pooled optimum but nonzero subgroup "
        "minimum (impossible for a valid curve)");
  }
  return e;
}

// Rate ratios at a fixed threshold. A zero pooled rate makes the affected
// ratio undefined (reported as absent, never infinity).
struct RateRatios {
  std::optional<double> fpr_ratio;
  std::optional<double> fnr_ratio;
};

inline RateRatios error_rate_ratios(const ErrorCurve& overall, const ErrorCurve& subgroup,
                                    double theta) {
  const auto o = overall.rates_at(theta);
  const auto s = subgroup.rates_at(theta);
  RateRatios r;
  if (o.fpr > 0.0) r.fpr_ratio = s.fpr / o.fpr;
  if (o.fnr > 0.0) r.fnr_ratio = s.fnr / o.fnr;
  return r;
}

// --- Report structures (the unit of serialization and comparison) ---

struct SubgroupMetrics {
  SubgroupKey subgroup;
  std::size_t n_speakers = 0;
  std::size_t n_target_trials = 0;
  std::size_t n_nontarget_trials = 0;
  double cdet_at_overall_min = 0.0;
  double cdet_at_sg_min = 0.0;
  double ratio_overall_min = 0.0;
  double ratio_sg_min = 0.0;
  std::optional<double> fpr_ratio;
  std::optional<double> fnr_ratio;

  bool operator==(const SubgroupMetrics&) const = default;
};

struct OverallMetrics {
  double min_cdet = 0.0;
  double min_cdet_threshold = 0.0;  // may be +/-inf
  double eer = 0.0;
  double eer_threshold = 0.0;
  std::size_t n_target_trials = 0;
  std::size_t n_nontarget_trials = 0;

  bool operator==(const OverallMetrics&) const = default;
};

struct FairnessReport {
  std::string model_name;
  CostParams cost_params;
  OverallMetrics overall;
  std::vector<SubgroupMetrics> subgroups;  // ordered by subgroup key
  FairnessIndexPair fairness_index;
  std::size_t excluded_trials = 0;
  IndexMode index_mode = IndexMode::kSumOfRatios;  // headline selection
  std::size_t min_speakers = 5;                    // warning threshold in force
  bool normalized = false;  // include cost values divided by the trivial-system cost

  bool operator==(const FairnessReport&) const = default;
};

// Everything the evaluation produces: the serializable report plus the curves
// and operating points the plotting layer needs.
struct SubgroupEvaluation {
  ErrorCurve curve;
  MinCost sg_min;
  SubgroupMetrics metrics;
};

struct EvaluationBundle {
  FairnessReport report;
  ErrorCurve overall_curve;
  MinCost overall_min;
  EerPoint overall_eer;
  std::map<SubgroupKey, SubgroupEvaluation> subgroups;
};

struct EvaluationOptions {
  CostParams cost_params;
  IndexMode index_mode = IndexMode::kSumOfRatios;
  std::size_t min_speakers = 5;
  bool normalized = false;
  std::string model_name;
};

namespace detail {

inline void split_scores(const std::vector<TrialRecord>& trials,
                         std::vector<double>& targets, std::vector<double>& nontargets) {
  targets.clear();
  nontargets.clear();
  for (const auto& t : trials)
    (t.is_target ? targets : nontargets).push_back(t.score);
}

}  // namespace detail

// Full evaluation of grouped trials: pooled curve, per-subgroup curves,
// ratios, and the fairness index. Degenerate populations (a subgroup with no
// targets or no nontargets) surface as DataError naming the subgroup.
inline EvaluationBundle evaluate_grouped(const GroupedTrials& grouped,
                                         const EvaluationOptions& options) {
  options.cost_params.validate();
  if (grouped.overall.empty())
    throw DataError("evaluate: no trials survived subgroup assignment");

  EvaluationBundle bundle;
  std::vector<double> targets, nontargets;
  detail::split_scores(grouped.overall, targets, nontargets);
  bundle.overall_curve = compute_error_curve(targets, nontargets);
  bundle.overall_min = min_detection_cost(bundle.overall_curve, options.cost_params);
  bundle.overall_eer = equal_error_rate(bundle.overall_curve);

  FairnessReport& report = bundle.report;
  report.model_name = options.model_name;
  report.cost_params = options.cost_params;
  report.index_mode = options.index_mode;
  report.min_speakers = options.min_speakers;
  report.normalized = options.normalized;
  report.excluded_trials = grouped.excluded_count;
  report.overall.min_cdet = bundle.overall_min.cost;
  report.overall.min_cdet_threshold = bundle.overall_min.threshold;
  report.overall.eer = bundle.overall_eer.eer;
  report.overall.eer_threshold = bundle.overall_eer.threshold;
  report.overall.n_target_trials = bundle.overall_curve.n_target;
  report.overall.n_nontarget_trials = bundle.overall_curve.n_nontarget;

  std::vector<double> ratios;
  ratios.reserve(grouped.by_subgroup.size());
  for (const auto& [key, slice] : grouped.by_subgroup) {
    detail::split_scores(slice.trials, targets, nontargets);
    SubgroupEvaluation se;
    try {
      se.curve = compute_error_curve(targets, nontargets);
    } catch (const DataError& e) {
      throw DataError("subgroup " + key.display() + ": " + e.what());
    }
    se.sg_min = min_detection_cost(se.curve, options.cost_params);
    const CdetEvaluation ce =
        subgroup_cdet_evaluation(bundle.overall_curve, se.curve, options.cost_params);
    const RateRatios rr = error_rate_ratios(bundle.overall_curve, se.curve,
                                            bundle.overall_min.threshold);

    SubgroupMetrics m;
    m.subgroup = key;
    m.n_speakers = slice.speakers.size();
    m.n_target_trials = slice.n_target;
    m.n_nontarget_trials = slice.n_nontarget;
    m.cdet_at_overall_min = ce.cdet_at_overall_min;
    m.cdet_at_sg_min = ce.cdet_at_sg_min;
    m.ratio_overall_min = ce.ratio_overall_min;
    m.ratio_sg_min = ce.ratio_sg_min;
    m.fpr_ratio = rr.fpr_ratio;
    m.fnr_ratio = rr.fnr_ratio;
    ratios.push_back(m.ratio_overall_min);

    se.metrics = m;
    report.subgroups.push_back(m);
    bundle.subgroups.emplace(key, std::move(se));
  }

  report.fairness_index = fairness_index_pair(ratios);
  return bundle;
}

// --- Cross-model comparison ---

struct ComparisonRow {
  SubgroupKey subgroup;
  std::size_t n_speakers = 0;  // from report A
  double ratio_a = 0.0;
  double ratio_b = 0.0;
  double difference = 0.0;     // ratio_a - ratio_b
};

// One row per shared subgroup, sorted by difference ascending (ties by
// subgroup key). The two reports must cover identical subgroup sets.
inline std::vector<ComparisonRow> compare_models(const FairnessReport& a,
                                                 const FairnessReport& b) {
  std::map<SubgroupKey, const SubgroupMetrics*> bmap;
  for (const auto& m : b.subgroups) bmap.emplace(m.subgroup, &m);

  std::vector<std::string> missing_in_b, missing_in_a;
  std::map<SubgroupKey, const SubgroupMetrics*> amap;
  for (const auto& m : a.subgroups) {
    amap.emplace(m.subgroup, &m);
    if (!bmap.count(m.subgroup)) missing_in_b.push_back(m.subgroup.display());
  }
  for (const auto& m : b.subgroups)
    if (!amap.count(m.subgroup)) missing_in_a.push_back(m.subgroup.display());

  if (!missing_in_a.empty() || !missing_in_b.empty()) {
    std::string msg = "compare: subgroup sets differ;";
    if (!missing_in_b.empty()) {
      msg += " only in " + (a.model_name.empty() ? std::string("A") : a.model_name) + ":";
      for (const auto& s : missing_in_b) msg += " " + s;
      msg += ";";
    }
    if (!missing_in_a.empty()) {
      msg += " only in " + (b.model_name.empty() ? std::string("B") : b.model_name) + ":";
      for (const auto& s : missing_in_a) msg += " " + s;
    }
    throw DataError(msg);
  }

  std::vector<ComparisonRow> rows;
  rows.reserve(a.subgroups.size());
  for (const auto& m : a.subgroups) {
    ComparisonRow r;
    r.subgroup = m.subgroup;
    r.n_speakers = m.n_speakers;
    r.ratio_a = m.ratio_overall_min;
    r.ratio_b = bmap.at(m.subgroup)->ratio_overall_min;
    r.difference = r.ratio_a - r.ratio_b;
    rows.push_back(std::move(r));
  }
  std::sort(rows.begin(), rows.end(), [](const ComparisonRow& x, const ComparisonRow& y) {
    if (x.difference != y.difference) return x.difference < y.difference;
    return x.subgroup < y.subgroup;
  });
  return rows;
}

}  // namespace fairdet
