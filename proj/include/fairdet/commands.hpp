// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Command implementations behind the CLI. Exit-code discipline:
//   0  success
//   1  fairness gate violation
//   2  usage or input error
// The argument parser lives in the tool binary; everything here is plain
// functions over RunConfig so the commands stay testable in-process.

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fairdet/det.hpp"
#include "fairdet/distribution.hpp"
#include "fairdet/error.hpp"
#include "fairdet/fairness.hpp"
#include "fairdet/ingest.hpp"
#include "fairdet/report_io.hpp"
#include "fairdet/svg.hpp"
#include "fairdet/synth.hpp"

namespace fairdet {

struct RunConfig {
  std::vector<std::string> scores;   // one file for evaluate/gate, two for compare
  std::string meta;
  std::vector<std::string> group_by;
  GroupPolicy policy = GroupPolicy::kEnrollSpeaker;
  ScoreFormat format = ScoreFormat::kCsv;
  CostParams cost_params;
  IndexMode index_mode = IndexMode::kSumOfRatios;
  std::size_t min_speakers = 5;
  bool normalized = false;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  std::optional<double> max_ratio;
  std::optional<double> max_fairness_index;
  std::vector<std::string> reports;  // gate/plot inputs
  std::string synth_spec;            // synth input
};

namespace detail {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write file '" + path.string() + "'");
  out << text;
  if (!out) throw UsageError("write failed for '" + path.string() + "'");
}

inline std::string model_name_of(const std::string& scores_path) {
  return std::filesystem::path(scores_path).stem().string();
}

inline std::vector<TrialRecord> load_scores(const std::string& path, ScoreFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open scores file '" + path + "'");
  return parse_scores(in, format, path);
}

inline Metadata load_metadata(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open metadata file '" + path + "'");
  return parse_metadata(in, path);
}

struct EvaluatedModel {
  GroupedTrials grouped;
  EvaluationBundle bundle;
};

inline EvaluatedModel evaluate_one(const RunConfig& cfg, const std::string& scores_path,
                                   const Metadata& meta) {
  EvaluatedModel m;
  const auto trials = load_scores(scores_path, cfg.format);
  m.grouped = assign_subgroups(trials, meta, cfg.group_by, cfg.policy);
  const DatasetSummary summary = validate_dataset(m.grouped, cfg.min_speakers);
  for (const auto& wmsg : summary.warnings) std::cerr << "warning: " << wmsg << "\n";
  if (m.grouped.excluded_count > 0)
    std::cerr << "warning: " << m.grouped.excluded_count
              << " trial(s) excluded from subgroup assignment\n";

  EvaluationOptions options;
  options.cost_params = cfg.cost_params;
  options.index_mode = cfg.index_mode;
  options.min_speakers = cfg.min_speakers;
  options.normalized = cfg.normalized;
  options.model_name = model_name_of(scores_path);
  m.bundle = evaluate_grouped(m.grouped, options);
  return m;
}

// DET series for one evaluated model: pooled curve first (optimum triangle +
// equal-error circle), then each subgroup (triangle at the pooled optimum,
// cross at its own optimum).
inline std::vector<DetSeries> det_series_of(const EvaluationBundle& bundle,
                                            const std::string& name_prefix,
                                            const std::string& dash, int first_color) {
  std::vector<DetSeries> series;
  int color = first_color;

  DetSeries overall;
  overall.name = name_prefix.empty() ? std::string("overall") : name_prefix + " overall";
  overall.dash = dash;
  overall.color_index = color < 0 ? -1 : color++;
  std::vector<MarkerRequest> markers;
  const auto& oc = bundle.overall_curve;
  markers.push_back({MarkerKind::kOverallMinCost, oc.fnr[bundle.overall_min.index],
                     oc.fpr[bundle.overall_min.index], bundle.overall_min.threshold});
  markers.push_back({MarkerKind::kEqualError, bundle.overall_eer.eer, bundle.overall_eer.eer,
                     bundle.overall_eer.threshold});
  overall.data = det_curve_points(oc, markers);
  series.push_back(std::move(overall));

  for (const auto& [key, se] : bundle.subgroups) {
    DetSeries s;
    s.name = name_prefix.empty() ? key.display() : name_prefix + " " + key.display();
    s.dash = dash;
    s.color_index = color < 0 ? -1 : color++;
    const auto at_overall = se.curve.rates_at(bundle.overall_min.threshold);
    const auto at_own = se.curve.rates_at(se.sg_min.threshold);
    std::vector<MarkerRequest> m;
    m.push_back({MarkerKind::kOverallMinCost, at_overall.fnr, at_overall.fpr,
                 bundle.overall_min.threshold});
    m.push_back({MarkerKind::kSubgroupMinCost, at_own.fnr, at_own.fpr,
                 se.sg_min.threshold});
    s.data = det_curve_points(se.curve, m);
    series.push_back(std::move(s));
  }
  return series;
}

inline std::vector<DistributionSeries> distribution_series_of(
    const EvaluationBundle& bundle, const GroupedTrials& grouped) {
  std::vector<DistributionSeries> series;
  std::vector<double> targets, nontargets;

  const auto add_pair = [&](const SubgroupKey& key, const std::string& label,
                            const std::vector<TrialRecord>& trials, std::size_t color) {
    split_scores(trials, targets, nontargets);
    series.push_back({label + " target",
                      score_distribution(targets, true, key), color});
    series.push_back({label + " nontarget",
                      score_distribution(nontargets, false, key), color});
  };

  add_pair(SubgroupKey{}, "overall", grouped.overall, 0);
  std::size_t color = 1;
  for (const auto& [key, slice] : grouped.by_subgroup)
    add_pair(key, key.display(), slice.trials, color++);
  (void)bundle;
  return series;
}

inline void print_report_summary(const FairnessReport& r) {
  std::printf("model: %s\n", r.model_name.c_str());
  std::printf("trials: %zu target, %zu nontarget, %zu excluded\n",
              r.overall.n_target_trials, r.overall.n_nontarget_trials, r.excluded_trials);
  std::printf("overall: min_cdet=%.6f  eer=%.4f%%\n", r.overall.min_cdet,
              r.overall.eer * 100.0);
  std::printf("fairness index (%s): %.4f   [literal: %.4f, sum-of-ratios: %.4f]\n",
              to_string(r.index_mode).c_str(), r.fairness_index.value(r.index_mode),
              r.fairness_index.literal, r.fairness_index.sum_of_ratios);
  std::printf("%-24s %9s %13s %13s %14s %10s\n", "subgroup", "speakers", "cdet@overall",
              "cdet@own", "ratio_overall", "ratio_own");
  for (const auto& m : r.subgroups)
    std::printf("%-24s %9zu %13.4f %13.4f %14.4f %10.4f\n", m.subgroup.display().c_str(),
                m.n_speakers, m.cdet_at_overall_min, m.cdet_at_sg_min, m.ratio_overall_min,
                m.ratio_sg_min);
}

}  // namespace detail

// Writes report.json, the two ratio CSVs, det.svg, distributions.svg, and
// ratios.svg into the output directory.
inline int cmd_evaluate(const RunConfig& cfg) {
  if (cfg.scores.size() != 1)
    throw UsageError("evaluate needs exactly one --scores file");
  if (cfg.meta.empty()) throw UsageError("evaluate needs --meta");
  if (cfg.group_by.empty()) throw UsageError("evaluate needs --group-by");

  const Metadata meta = detail::load_metadata(cfg.meta);
  const auto model = detail::evaluate_one(cfg, cfg.scores[0], meta);
  const FairnessReport& report = model.bundle.report;

  namespace fs = std::filesystem;
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  detail::write_text_file(out / "report.json", emit_report(report, ReportFormat::kJson));
  detail::write_text_file(out / "cdet_ratios.csv", cost_ratio_csv(report));
  detail::write_text_file(out / "error_rate_ratios.csv", rate_ratio_csv(report));

  DetPlotStyle det_style;
  det_style.title = report.model_name + " detection error tradeoff";
  detail::write_text_file(out / "det.svg",
                          render_det_svg(detail::det_series_of(model.bundle, "", "", -1),
                                         det_style));
  DistributionPlotStyle dist_style;
  dist_style.title = report.model_name + " score distributions";
  detail::write_text_file(
      out / "distributions.svg",
      render_distribution_svg(detail::distribution_series_of(model.bundle, model.grouped),
                              dist_style));
  detail::write_text_file(out / "ratios.svg", render_ratio_chart_svg(report));

  detail::print_report_summary(report);
  return 0;
}

// Writes ratio_comparison.csv, report_a.json, report_b.json,
// ratio_scatter.svg, and det_compare.svg (model A solid, model B dashed).
inline int cmd_compare(const RunConfig& cfg) {
  if (cfg.scores.size() != 2)
    throw UsageError("compare needs exactly two --scores files");
  if (cfg.meta.empty()) throw UsageError("compare needs --meta");
  if (cfg.group_by.empty()) throw UsageError("compare needs --group-by");

  const Metadata meta = detail::load_metadata(cfg.meta);
  const auto model_a = detail::evaluate_one(cfg, cfg.scores[0], meta);
  const auto model_b = detail::evaluate_one(cfg, cfg.scores[1], meta);
  const auto rows = compare_models(model_a.bundle.report, model_b.bundle.report);

  namespace fs = std::filesystem;
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  detail::write_text_file(out / "report_a.json",
                          emit_report(model_a.bundle.report, ReportFormat::kJson));
  detail::write_text_file(out / "report_b.json",
                          emit_report(model_b.bundle.report, ReportFormat::kJson));
  detail::write_text_file(out / "ratio_comparison.csv", comparison_csv(rows));

  const std::string name_a = model_a.bundle.report.model_name;
  const std::string name_b = model_b.bundle.report.model_name;
  detail::write_text_file(
      out / "ratio_scatter.svg",
      render_scatter_svg(ratio_scatter(rows, name_a, name_b)));

  // Same palette slot for the same subgroup in both models; dash tells the
  // models apart.
  auto series = detail::det_series_of(model_a.bundle, name_a, "", 0);
  auto series_b = detail::det_series_of(model_b.bundle, name_b, "6,4", 0);
  series.insert(series.end(), std::make_move_iterator(series_b.begin()),
                std::make_move_iterator(series_b.end()));
  DetPlotStyle det_style;
  det_style.title = name_a + " (solid) vs " + name_b + " (dashed)";
  detail::write_text_file(out / "det_compare.svg", render_det_svg(series, det_style));

  std::printf("%-24s %10s %10s %12s\n", "subgroup", name_a.substr(0, 10).c_str(),
              name_b.substr(0, 10).c_str(), "difference");
  for (const auto& r : rows)
    std::printf("%-24s %10.4f %10.4f %12.4f\n", r.subgroup.display().c_str(), r.ratio_a,
                r.ratio_b, r.difference);
  return 0;
}

// Loads or computes a report, then checks the configured limits. Violations
// print one machine-parsable line each: subgroup<TAB>ratio<TAB>limit.
inline int cmd_gate(const RunConfig& cfg) {
  if (!cfg.max_ratio && !cfg.max_fairness_index)
    throw UsageError("no gate criteria: give --max-ratio and/or --max-fairness-index");

  FairnessReport report;
  if (!cfg.reports.empty()) {
    if (cfg.reports.size() != 1 || !cfg.scores.empty())
      throw UsageError("gate takes either one --report or one --scores file");
    report = parse_report(detail::read_text_file(cfg.reports[0]), cfg.reports[0]);
  } else {
    if (cfg.scores.size() != 1)
      throw UsageError("gate needs a --report file or exactly one --scores file");
    if (cfg.meta.empty()) throw UsageError("gate needs --meta when given --scores");
    if (cfg.group_by.empty()) throw UsageError("gate needs --group-by when given --scores");
    const Metadata meta = detail::load_metadata(cfg.meta);
    report = detail::evaluate_one(cfg, cfg.scores[0], meta).bundle.report;
  }

  bool violated = false;
  if (cfg.max_ratio) {
    for (const auto& m : report.subgroups) {
      if (m.ratio_overall_min > *cfg.max_ratio) {
        violated = true;
        std::printf("%s\t%.4f\t%.4f\n", m.subgroup.display().c_str(), m.ratio_overall_min,
                    *cfg.max_ratio);
      }
    }
  }
  if (cfg.max_fairness_index) {
    const double value = report.fairness_index.value(cfg.index_mode);
    if (value > *cfg.max_fairness_index) {
      violated = true;
      std::printf("fairness_index\t%.4f\t%.4f\n", value, *cfg.max_fairness_index);
    }
  }
  if (violated) return 1;
  std::printf("gate passed\n");
  return 0;
}

// Re-renders plots from saved reports: one report gives the ratio chart, two
// give the cross-model scatter (plus its table). DET and distribution plots
// need the original scores, so they are only rendered when --scores/--meta
// are also supplied.
inline int cmd_plot(const RunConfig& cfg) {
  if (cfg.reports.empty() && cfg.scores.empty())
    throw UsageError("plot needs --report file(s) and/or --scores with --meta");
  if (cfg.reports.size() > 2)
    throw UsageError("plot takes at most two --report files");

  namespace fs = std::filesystem;
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);

  if (cfg.reports.size() == 1) {
    const FairnessReport report =
        parse_report(detail::read_text_file(cfg.reports[0]), cfg.reports[0]);
    detail::write_text_file(out / "ratios.svg", render_ratio_chart_svg(report));
  } else if (cfg.reports.size() == 2) {
    const FairnessReport a =
        parse_report(detail::read_text_file(cfg.reports[0]), cfg.reports[0]);
    const FairnessReport b =
        parse_report(detail::read_text_file(cfg.reports[1]), cfg.reports[1]);
    const auto rows = compare_models(a, b);
    const std::string name_a = a.model_name.empty() ? "model A" : a.model_name;
    const std::string name_b = b.model_name.empty() ? "model B" : b.model_name;
    detail::write_text_file(out / "ratio_scatter.svg",
                            render_scatter_svg(ratio_scatter(rows, name_a, name_b)));
    detail::write_text_file(out / "ratio_comparison.csv", comparison_csv(rows));
  }

  if (!cfg.scores.empty()) {
    if (cfg.scores.size() != 1)
      throw UsageError("plot takes at most one --scores file");
    if (cfg.meta.empty()) throw UsageError("plot needs --meta when given --scores");
    if (cfg.group_by.empty()) throw UsageError("plot needs --group-by when given --scores");
    const Metadata meta = detail::load_metadata(cfg.meta);
    const auto model = detail::evaluate_one(cfg, cfg.scores[0], meta);
    DetPlotStyle det_style;
    det_style.title = model.bundle.report.model_name + " detection error tradeoff";
    detail::write_text_file(out / "det.svg",
                            render_det_svg(detail::det_series_of(model.bundle, "", "", -1),
                                           det_style));
    DistributionPlotStyle dist_style;
    dist_style.title = model.bundle.report.model_name + " score distributions";
    detail::write_text_file(
        out / "distributions.svg",
        render_distribution_svg(
            detail::distribution_series_of(model.bundle, model.grouped), dist_style));
  }
  return 0;
}

// Generates scores.csv and metadata.csv from a distribution spec file.
inline int cmd_synth(const RunConfig& cfg) {
  if (cfg.synth_spec.empty()) throw UsageError("synth needs a spec file");
  const SynthSpec spec =
      parse_synth_spec(detail::read_text_file(cfg.synth_spec), cfg.synth_spec);
  const SynthOutput data = generate_trials(spec, cfg.seed);

  namespace fs = std::filesystem;
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  {
    std::ofstream scores(out / "scores.csv", std::ios::binary);
    if (!scores) throw UsageError("cannot write file '" + (out / "scores.csv").string() + "'");
    write_scores_csv(scores, data.trials);
  }
  {
    std::ofstream metacsv(out / "metadata.csv", std::ios::binary);
    if (!metacsv)
      throw UsageError("cannot write file '" + (out / "metadata.csv").string() + "'");
    write_metadata_csv(metacsv, data.metadata);
  }
  std::printf("wrote %zu trials, %zu speakers (seed %llu)\n", data.trials.size(),
              data.metadata.speakers.size(),
              static_cast<unsigned long long>(cfg.seed));
  return 0;
}

// Uniform error mapping for the tool binary: library errors are diagnostics
// plus exit 2; gate violations return 1 from cmd_gate itself.
template <typename Fn>
inline int run_command(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace fairdet
