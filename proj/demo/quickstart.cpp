// Library quickstart: generate a small synthetic dataset, evaluate it, and
// print the fairness report. Run from anywhere; writes nothing to disk.

#include <cstdio>
#include <sstream>

#include "fairdet/fairdet.hpp"

int main() {
  using namespace fairdet;

  // Two subgroups; the second one's impostor scores creep toward the target
  // lobe, which is exactly the pattern the cost ratios are built to expose.
  SynthSpec spec;
  spec.attributes = {"nationality", "sex"};
  spec.subgroups.push_back({SubgroupKey{{"norway", "m"}},
                            {2.0, 1.0}, {-2.0, 1.0}, 2000, 2000, 8});
  spec.subgroups.push_back({SubgroupKey{{"india", "f"}},
                            {2.0, 1.0}, {0.0, 1.0}, 2000, 2000, 8});
  const SynthOutput data = generate_trials(spec, /*seed=*/7);

  const GroupedTrials grouped = assign_subgroups(
      data.trials, data.metadata, {"nationality", "sex"}, GroupPolicy::kRequireSame);

  EvaluationOptions options;
  options.model_name = "quickstart";
  const EvaluationBundle bundle = evaluate_grouped(grouped, options);

  const FairnessReport& r = bundle.report;
  std::printf("overall min C_Det %.4f at threshold %.3f, EER %.2f%%\n",
              r.overall.min_cdet, r.overall.min_cdet_threshold, r.overall.eer * 100.0);
  for (const auto& m : r.subgroups)
    std::printf("%-10s ratio at pooled optimum %.4f, at own optimum %.4f\n",
                m.subgroup.display().c_str(), m.ratio_overall_min, m.ratio_sg_min);
  std::printf("fairness index: %.4f (sum-of-ratios), %.4f (literal)\n",
              r.fairness_index.sum_of_ratios, r.fairness_index.literal);

  // Reports serialize to JSON and round-trip.
  std::ostringstream json;
  json << emit_report(r, ReportFormat::kJson);
  const FairnessReport parsed = parse_report(json.str());
  std::printf("round-trip ok: %s\n", parsed == r ? "yes" : "no");
  return 0;
}
