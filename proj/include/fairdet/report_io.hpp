// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Report serialization.
//
// JSON schema (field names are stable interface):
//   { model_name, cost_params:{p_target,c_fn,c_fp},
//     overall:{min_cdet, min_cdet_threshold, eer, eer_threshold,
//              n_target_trials, n_nontarget_trials},
//     subgroups:[{name, n_speakers, n_target_trials, n_nontarget_trials,
//                 cdet_at_overall_min, cdet_at_sg_min, ratio_overall_min,
//                 ratio_sg_min, fpr_ratio, fnr_ratio}],
//     fairness_index:{literal, sum_of_ratios}, excluded_trials,
//     index_mode, min_speakers }
//
// Undefined ratios are nulls. Infinite thresholds (a trivial accept-all /
// reject-all optimum) are the strings "inf" / "-inf" since JSON has no
// infinities. With the normalized option, *_normalized cost fields are added
// (cost divided by the better trivial system's cost); they are derived values
// and never parsed back.
//
// CSV emitters produce three fixed table layouts:
//   cost ratios    subgroup,n_speakers,cdet_overall_min,cdet_sg_min,ratio_overall_min,ratio_sg_min
//   rate ratios    subgroup,n_speakers,fpr_ratio,fnr_ratio
//   comparison     subgroup,n_speakers,ratio_a,ratio_b,difference

#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairdet/error.hpp"
#include "fairdet/fairness.hpp"

namespace fairdet {

enum class ReportFormat { kJson, kCsv };

namespace detail {

inline std::string fmt_fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline nlohmann::json threshold_to_json(double v) {
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  return v;
}

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key,
                                           const std::string& ctx) {
  const auto it = j.find(key);
  if (it == j.end())
    throw ParseError("report JSON: missing field '" + ctx + key + "'");
  return *it;
}

inline double require_double(const nlohmann::json& j, const char* key,
                             const std::string& ctx) {
  const auto& f = require_field(j, key, ctx);
  if (!f.is_number())
    throw ParseError("report JSON: field '" + ctx + key + "' must be a number");
  return f.get<double>();
}

inline double require_threshold(const nlohmann::json& j, const char* key,
                                const std::string& ctx) {
  const auto& f = require_field(j, key, ctx);
  if (f.is_number()) return f.get<double>();
  if (f.is_string()) {
    const std::string s = f.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ParseError("report JSON: field '" + ctx + key +
                   "' must be a number or \"inf\"/\"-inf\"");
}

inline std::size_t require_count(const nlohmann::json& j, const char* key,
                                 const std::string& ctx) {
  const auto& f = require_field(j, key, ctx);
  if (!f.is_number_unsigned())
    throw ParseError("report JSON: field '" + ctx + key +
                     "' must be a nonnegative integer");
  return f.get<std::size_t>();
}

inline std::string require_string(const nlohmann::json& j, const char* key,
                                  const std::string& ctx) {
  const auto& f = require_field(j, key, ctx);
  if (!f.is_string())
    throw ParseError("report JSON: field '" + ctx + key + "' must be a string");
  return f.get<std::string>();
}

inline std::optional<double> optional_ratio(const nlohmann::json& j, const char* key,
                                            const std::string& ctx) {
  const auto& f = require_field(j, key, ctx);
  if (f.is_null()) return std::nullopt;
  if (!f.is_number())
    throw ParseError("report JSON: field '" + ctx + key + "' must be a number or null");
  return f.get<double>();
}

}  // namespace detail

inline nlohmann::json report_to_json(const FairnessReport& r) {
  nlohmann::json j;
  j["model_name"] = r.model_name;
  j["cost_params"] = {{"p_target", r.cost_params.p_target},
                      {"c_fn", r.cost_params.c_fn},
                      {"c_fp", r.cost_params.c_fp}};
  nlohmann::json overall;
  overall["min_cdet"] = r.overall.min_cdet;
  overall["min_cdet_threshold"] = detail::threshold_to_json(r.overall.min_cdet_threshold);
  overall["eer"] = r.overall.eer;
  overall["eer_threshold"] = detail::threshold_to_json(r.overall.eer_threshold);
  overall["n_target_trials"] = r.overall.n_target_trials;
  overall["n_nontarget_trials"] = r.overall.n_nontarget_trials;
  if (r.normalized)
    overall["min_cdet_normalized"] = r.overall.min_cdet / r.cost_params.normalizer();
  j["overall"] = std::move(overall);

  nlohmann::json subgroups = nlohmann::json::array();
  for (const auto& m : r.subgroups) {
    nlohmann::json g;
    g["name"] = m.subgroup.display();
    g["values"] = m.subgroup.values;
    g["n_speakers"] = m.n_speakers;
    g["n_target_trials"] = m.n_target_trials;
    g["n_nontarget_trials"] = m.n_nontarget_trials;
    g["cdet_at_overall_min"] = m.cdet_at_overall_min;
    g["cdet_at_sg_min"] = m.cdet_at_sg_min;
    g["ratio_overall_min"] = m.ratio_overall_min;
    g["ratio_sg_min"] = m.ratio_sg_min;
    if (m.fpr_ratio) g["fpr_ratio"] = *m.fpr_ratio; else g["fpr_ratio"] = nullptr;
    if (m.fnr_ratio) g["fnr_ratio"] = *m.fnr_ratio; else g["fnr_ratio"] = nullptr;
    if (r.normalized) {
      g["cdet_at_overall_min_normalized"] =
          m.cdet_at_overall_min / r.cost_params.normalizer();
      g["cdet_at_sg_min_normalized"] = m.cdet_at_sg_min / r.cost_params.normalizer();
    }
    subgroups.push_back(std::move(g));
  }
  j["subgroups"] = std::move(subgroups);
  j["fairness_index"] = {{"literal", r.fairness_index.literal},
                         {"sum_of_ratios", r.fairness_index.sum_of_ratios}};
  j["excluded_trials"] = r.excluded_trials;
  j["index_mode"] = to_string(r.index_mode);
  j["min_speakers"] = r.min_speakers;
  return j;
}

inline FairnessReport report_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("report JSON: top level must be an object");
  FairnessReport r;
  r.model_name = detail::require_string(j, "model_name", "");

  const auto& cp = detail::require_field(j, "cost_params", "");
  r.cost_params.p_target = detail::require_double(cp, "p_target", "cost_params.");
  r.cost_params.c_fn = detail::require_double(cp, "c_fn", "cost_params.");
  r.cost_params.c_fp = detail::require_double(cp, "c_fp", "cost_params.");

  const auto& ov = detail::require_field(j, "overall", "");
  r.overall.min_cdet = detail::require_double(ov, "min_cdet", "overall.");
  r.overall.min_cdet_threshold =
      detail::require_threshold(ov, "min_cdet_threshold", "overall.");
  r.overall.eer = detail::require_double(ov, "eer", "overall.");
  r.overall.eer_threshold = detail::require_threshold(ov, "eer_threshold", "overall.");
  r.overall.n_target_trials = detail::require_count(ov, "n_target_trials", "overall.");
  r.overall.n_nontarget_trials =
      detail::require_count(ov, "n_nontarget_trials", "overall.");
  if (ov.contains("min_cdet_normalized")) r.normalized = true;

  const auto& sgs = detail::require_field(j, "subgroups", "");
  if (!sgs.is_array()) throw ParseError("report JSON: field 'subgroups' must be an array");
  std::size_t contributing = 0;
  for (const auto& g : sgs) {
    SubgroupMetrics m;
    const std::string name = detail::require_string(g, "name", "subgroups[].");
    const auto vit = g.find("values");
    if (vit != g.end() && vit->is_array()) {
      for (const auto& v : *vit) {
        if (!v.is_string())
          throw ParseError("report JSON: field 'subgroups[].values' must hold strings");
        m.subgroup.values.push_back(v.get<std::string>());
      }
    } else {
      m.subgroup.values.push_back(name);  // display-name fallback
    }
    m.n_speakers = detail::require_count(g, "n_speakers", "subgroups[].");
    m.n_target_trials = detail::require_count(g, "n_target_trials", "subgroups[].");
    m.n_nontarget_trials = detail::require_count(g, "n_nontarget_trials", "subgroups[].");
    m.cdet_at_overall_min = detail::require_double(g, "cdet_at_overall_min", "subgroups[].");
    m.cdet_at_sg_min = detail::require_double(g, "cdet_at_sg_min", "subgroups[].");
    m.ratio_overall_min = detail::require_double(g, "ratio_overall_min", "subgroups[].");
    m.ratio_sg_min = detail::require_double(g, "ratio_sg_min", "subgroups[].");
    m.fpr_ratio = detail::optional_ratio(g, "fpr_ratio", "subgroups[].");
    m.fnr_ratio = detail::optional_ratio(g, "fnr_ratio", "subgroups[].");
    if (m.ratio_overall_min > 1.0) ++contributing;
    r.subgroups.push_back(std::move(m));
  }

  const auto& fi = detail::require_field(j, "fairness_index", "");
  r.fairness_index.literal = detail::require_double(fi, "literal", "fairness_index.");
  r.fairness_index.sum_of_ratios =
      detail::require_double(fi, "sum_of_ratios", "fairness_index.");
  r.fairness_index.contributing = contributing;

  r.excluded_trials = detail::require_count(j, "excluded_trials", "");
  if (j.contains("index_mode"))
    r.index_mode = index_mode_from_string(detail::require_string(j, "index_mode", ""));
  if (j.contains("min_speakers"))
    r.min_speakers = detail::require_count(j, "min_speakers", "");
  return r;
}

inline FairnessReport parse_report(const std::string& text,
                                   const std::string& source_name = "<report>") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source_name + ": not valid JSON: " + e.what());
  }
  try {
    return report_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(source_name + ": " + e.what());
  }
}

// Cost-ratio table, one row per subgroup in report order.
inline std::string cost_ratio_csv(const FairnessReport& r) {
  std::string out =
      "subgroup,n_speakers,cdet_overall_min,cdet_sg_min,ratio_overall_min,ratio_sg_min\n";
  for (const auto& m : r.subgroups) {
    out += m.subgroup.display();
    out += ',' + std::to_string(m.n_speakers);
    out += ',' + detail::fmt_fixed(m.cdet_at_overall_min);
    out += ',' + detail::fmt_fixed(m.cdet_at_sg_min);
    out += ',' + detail::fmt_fixed(m.ratio_overall_min);
    out += ',' + detail::fmt_fixed(m.ratio_sg_min);
    out += '\n';
  }
  return out;
}

// Rate-ratio table; undefined ratios are an explicit marker, never inf.
inline std::string rate_ratio_csv(const FairnessReport& r) {
  std::string out = "subgroup,n_speakers,fpr_ratio,fnr_ratio\n";
  for (const auto& m : r.subgroups) {
    out += m.subgroup.display();
    out += ',' + std::to_string(m.n_speakers);
    out += ',';
    out += m.fpr_ratio ? detail::fmt_fixed(*m.fpr_ratio) : "undefined";
    out += ',';
    out += m.fnr_ratio ? detail::fmt_fixed(*m.fnr_ratio) : "undefined";
    out += '\n';
  }
  return out;
}

// Comparison table in the row order produced by compare_models.
inline std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "subgroup,n_speakers,ratio_a,ratio_b,difference\n";
  for (const auto& row : rows) {
    out += row.subgroup.display();
    out += ',' + std::to_string(row.n_speakers);
    out += ',' + detail::fmt_fixed(row.ratio_a);
    out += ',' + detail::fmt_fixed(row.ratio_b);
    out += ',' + detail::fmt_fixed(row.difference);
    out += '\n';
  }
  return out;
}

// Single-call emitter: JSON (lossless, round-trips through parse_report) or
// the two CSV tables concatenated with a blank separator line.
inline std::string emit_report(const FairnessReport& r, ReportFormat format) {
  if (format == ReportFormat::kJson) return report_to_json(r).dump(2) + "\n";
  return cost_ratio_csv(r) + "\n" + rate_ratio_csv(r);
}

}  // namespace fairdet
