// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// CLI entry point. Subcommands:
//   evaluate  score file -> fairness report + plots
//   compare   two score files -> ratio comparison + overlaid plots
//   gate      report or scores vs configured limits (CI check)
//   plot      re-render plots from saved reports
//   synth     seeded synthetic dataset generation

#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairdet/commands.hpp"

namespace {

// Splits "nationality,sex" into its attribute names.
std::vector<std::string> split_group_by(const std::string& arg) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= arg.size()) {
    const std::size_t pos = arg.find(',', start);
    if (pos == std::string::npos) {
      if (start < arg.size()) out.push_back(arg.substr(start));
      break;
    }
    if (pos > start) out.push_back(arg.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

struct CliOptions {
  fairdet::RunConfig cfg;
  std::string group_by_arg;
  std::string policy_arg = "enroll";
  std::string format_arg = "csv";
  std::string index_mode_arg = "sum-of-ratios";

  void finish() {
    cfg.group_by = split_group_by(group_by_arg);
    if (policy_arg == "enroll") cfg.policy = fairdet::GroupPolicy::kEnrollSpeaker;
    else if (policy_arg == "require-same") cfg.policy = fairdet::GroupPolicy::kRequireSame;
    else cfg.policy = fairdet::GroupPolicy::kExcludeMixed;
    cfg.format = format_arg == "voxceleb" ? fairdet::ScoreFormat::kVoxceleb
                                          : fairdet::ScoreFormat::kCsv;
    cfg.index_mode = fairdet::index_mode_from_string(index_mode_arg);
  }
};

void add_data_options(CLI::App* cmd, CliOptions& o, bool meta_needed) {
  cmd->add_option("--scores", o.cfg.scores, "score file (repeat for compare)");
  if (meta_needed) {
    cmd->add_option("--meta", o.cfg.meta, "speaker metadata CSV");
    cmd->add_option("--group-by", o.group_by_arg,
                    "comma-separated attribute names, e.g. nationality,sex");
    cmd->add_option("--policy", o.policy_arg, "mixed-pair policy")
        ->check(CLI::IsMember({"enroll", "require-same", "exclude-mixed"}));
    cmd->add_option("--format", o.format_arg, "score file format")
        ->check(CLI::IsMember({"csv", "voxceleb"}));
    cmd->add_option("--min-speakers", o.cfg.min_speakers,
                    "subgroup speaker count below which a warning is emitted");
  }
}

void add_cost_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--p-target", o.cfg.cost_params.p_target, "target prior of the cost");
  cmd->add_option("--c-fn", o.cfg.cost_params.c_fn, "false negative (miss) cost weight");
  cmd->add_option("--c-fp", o.cfg.cost_params.c_fp, "false positive cost weight");
  cmd->add_option("--index-mode", o.index_mode_arg, "headline fairness-index mode")
      ->check(CLI::IsMember({"literal", "sum-of-ratios"}));
  cmd->add_flag("--normalized", o.cfg.normalized,
                "also output costs normalized by the better trivial system");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subgroup fairness evaluation for speaker verification scores"};
  app.require_subcommand(1);

  CliOptions o;

  auto* evaluate = app.add_subcommand("evaluate", "compute a fairness report and plots");
  add_data_options(evaluate, o, true);
  add_cost_options(evaluate, o);
  evaluate->add_option("--out", o.cfg.out_dir, "output directory");

  auto* compare = app.add_subcommand("compare", "compare two models' score files");
  add_data_options(compare, o, true);
  add_cost_options(compare, o);
  compare->add_option("--out", o.cfg.out_dir, "output directory");

  auto* gate = app.add_subcommand("gate", "fail (exit 1) when fairness limits are exceeded");
  add_data_options(gate, o, true);
  add_cost_options(gate, o);
  gate->add_option("--report", o.cfg.reports, "previously written report.json");
  double max_ratio_arg = 0.0, max_index_arg = 0.0;
  auto* max_ratio_opt =
      gate->add_option("--max-ratio", max_ratio_arg, "largest allowed subgroup cost ratio");
  auto* max_index_opt = gate->add_option("--max-fairness-index", max_index_arg,
                                         "largest allowed fairness index");

  auto* plot = app.add_subcommand("plot", "re-render plots from saved reports");
  add_data_options(plot, o, true);
  plot->add_option("--report", o.cfg.reports, "report.json (repeat for a comparison scatter)");
  add_cost_options(plot, o);
  plot->add_option("--out", o.cfg.out_dir, "output directory");

  auto* synth = app.add_subcommand("synth", "generate a seeded synthetic dataset");
  synth->add_option("spec", o.cfg.synth_spec, "JSON distribution spec")->required();
  synth->add_option("--seed", o.cfg.seed, "RNG seed");
  synth->add_option("--out", o.cfg.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help text, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage errors are always exit 2
  }

  return fairdet::run_command([&]() {
    o.finish();
    if (max_ratio_opt->count()) o.cfg.max_ratio = max_ratio_arg;
    if (max_index_opt->count()) o.cfg.max_fairness_index = max_index_arg;
    if (evaluate->parsed()) return fairdet::cmd_evaluate(o.cfg);
    if (compare->parsed()) return fairdet::cmd_compare(o.cfg);
    if (gate->parsed()) return fairdet::cmd_gate(o.cfg);
    if (plot->parsed()) return fairdet::cmd_plot(o.cfg);
    return fairdet::cmd_synth(o.cfg);
  });
}
