// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fairdet/error.hpp"
#include "fairdet/fairness.hpp"
#include "fairdet/ingest.hpp"

using namespace fairdet;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

// Random scores on a 1/64 grid in [-8, 8]: coarse enough that strictly
// increasing transforms cannot collapse two distinct values in double
// precision, fine enough to produce plenty of ties.
std::vector<double> grid_scores(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> g(-512, 512);
  std::vector<double> out(n);
  for (auto& s : out) s = g(rng) / 64.0;
  return out;
}

struct SubgroupScores {
  std::vector<double> targets;
  std::vector<double> nontargets;
};

std::vector<SubgroupScores> random_partition(std::mt19937_64& rng, std::size_t groups) {
  std::uniform_int_distribution<int> n(5, 80);
  std::vector<SubgroupScores> out(groups);
  for (auto& sg : out) {
    sg.targets = grid_scores(rng, n(rng));
    sg.nontargets = grid_scores(rng, n(rng));
  }
  return out;
}

SubgroupScores pool(const std::vector<SubgroupScores>& parts) {
  SubgroupScores all;
  for (const auto& p : parts) {
    all.targets.insert(all.targets.end(), p.targets.begin(), p.targets.end());
    all.nontargets.insert(all.nontargets.end(), p.nontargets.begin(), p.nontargets.end());
  }
  return all;
}

}  // namespace

TEST_CASE("fairness index aggregates only ratios above parity") {
  SECTION("all at or below 1 scores a perfect 0 in either mode") {
    const std::vector<double> r{0.2, 1.0, 0.99, 0.0};
    const auto pair = fairness_index_pair(r);
    CHECK(pair.literal == 0.0);
    CHECK(pair.sum_of_ratios == 0.0);
    CHECK(pair.contributing == 0);
  }
  SECTION("modes differ by exactly the contributing count") {
    const std::vector<double> r{0.5, 1.2, 2.0, 1.0};
    const auto pair = fairness_index_pair(r);
    CHECK(pair.contributing == 2);
    CHECK_THAT(pair.sum_of_ratios, WithinAbs(3.2, 1e-12));
    CHECK(pair.literal == pair.sum_of_ratios - 2.0);
    CHECK(fairness_index(r, IndexMode::kLiteral) == pair.literal);
    CHECK(fairness_index(r, IndexMode::kSumOfRatios) == pair.sum_of_ratios);
  }
  SECTION("negative ratios are rejected") {
    const std::vector<double> r{0.5, -0.1};
    CHECK_THROWS_AS(fairness_index_pair(r), DataError);
  }
  SECTION("permutation invariance is bitwise") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::vector<double> r(17);
    for (auto& x : r) x = u(rng);
    const auto base = fairness_index_pair(r);
    for (int rep = 0; rep < 25; ++rep) {
      std::shuffle(r.begin(), r.end(), rng);
      const auto again = fairness_index_pair(r);
      CHECK(again == base);
    }
  }
  SECTION("strictly increasing in any ratio above 1") {
    std::vector<double> r{0.8, 1.3, 2.4};
    const auto base = fairness_index_pair(r);
    r[1] += 0.05;
    const auto bumped = fairness_index_pair(r);
    CHECK(bumped.literal > base.literal);
    CHECK(bumped.sum_of_ratios > base.sum_of_ratios);

    // Pushing a compliant ratio across parity also raises the index.
    r[0] = 1.01;
    const auto crossed = fairness_index_pair(r);
    CHECK(crossed.sum_of_ratios > bumped.sum_of_ratios);
    CHECK(crossed.contributing == 3);
  }
  SECTION("index mode names round-trip") {
    CHECK(index_mode_from_string("literal") == IndexMode::kLiteral);
    CHECK(index_mode_from_string("sum-of-ratios") == IndexMode::kSumOfRatios);
    CHECK(to_string(IndexMode::kSumOfRatios) == "sum-of-ratios");
    CHECK_THROWS_AS(index_mode_from_string("other"), UsageError);
  }
}

TEST_CASE("subgroup cost evaluation against the pooled optimum") {
  const CostParams d;

  SECTION("a subgroup identical to the pool sits exactly at parity") {
    const std::vector<double> t{2.0, 1.0, -0.5};
    const std::vector<double> n{-2.0, -1.0, 0.5};
    const ErrorCurve c = compute_error_curve(t, n);
    const CdetEvaluation e = subgroup_cdet_evaluation(c, c, d);
    CHECK(e.ratio_overall_min == 1.0);
    CHECK(e.ratio_sg_min == 1.0);
    CHECK(e.cdet_at_overall_min == e.cdet_at_sg_min);
  }

  SECTION("the subgroup minimum never beats the pooled operating point") {
    std::mt19937_64 rng(19);
    int evaluated = 0;
    for (int rep = 0; rep < 300 && evaluated < 200; ++rep) {
      const auto parts = random_partition(rng, 3);
      const auto all = pool(parts);
      const ErrorCurve overall = compute_error_curve(all.targets, all.nontargets);
      if (!(min_detection_cost(overall, d).cost > 0.0)) continue;  // separable pool
      ++evaluated;
      for (const auto& p : parts) {
        const ErrorCurve sub = compute_error_curve(p.targets, p.nontargets);
        const CdetEvaluation e = subgroup_cdet_evaluation(overall, sub, d);
        REQUIRE(e.ratio_sg_min <= 1.0 + 1e-12);
        REQUIRE(e.ratio_overall_min >= 0.0);
        REQUIRE(e.cdet_at_sg_min <= e.cdet_at_overall_min + 1e-15);
      }
    }
    REQUIRE(evaluated >= 200);
  }

  SECTION("a perfectly separated subgroup at a pooled optimum that misses nothing") {
    // Subgroup A separates cleanly; subgroup B is partly inverted, so the
    // pooled minimum is positive while A's cost at that threshold is zero.
    const std::vector<double> at{1.0, 2.0}, an{-2.0, -1.0};
    const std::vector<double> pool_t{1.0, 2.0, 0.6, 0.3}, pool_n{-2.0, -1.0, 0.4, 0.7};
    const ErrorCurve overall = compute_error_curve(pool_t, pool_n);
    const ErrorCurve a = compute_error_curve(at, an);
    const CdetEvaluation e = subgroup_cdet_evaluation(overall, a, d);
    CHECK(e.cdet_at_overall_min == 0.0);
    CHECK(e.ratio_overall_min == 0.0);
    CHECK(e.ratio_sg_min == 1.0);  // zero over zero reads as parity
  }

  SECTION("a costless pooled optimum leaves the ratio undefined") {
    const std::vector<double> t{1.0, 2.0}, n{-2.0, -1.0};
    const ErrorCurve sep = compute_error_curve(t, n);
    CHECK_THROWS_WITH(subgroup_cdet_evaluation(sep, sep, d),
                      ContainsSubstring("pooled minimum cost is zero"));
  }
}

TEST_CASE("error rate ratios are undefined when the pooled rate is zero") {
  const std::vector<double> pool_t{1.0, 2.0, 0.6, 0.3}, pool_n{-2.0, -1.0, 0.4, 0.7};
  const std::vector<double> sub_t{1.0, 2.0}, sub_n{-2.0, -1.0};
  const ErrorCurve overall = compute_error_curve(pool_t, pool_n);
  const ErrorCurve sub = compute_error_curve(sub_t, sub_n);
  const CostParams d;
  const double theta = min_detection_cost(overall, d).threshold;  // 1.0: FPR pool = 0

  const RateRatios r = error_rate_ratios(overall, sub, theta);
  CHECK_FALSE(r.fpr_ratio.has_value());
  REQUIRE(r.fnr_ratio.has_value());
  CHECK(*r.fnr_ratio == 0.0);  // the subgroup misses nothing at that threshold

  SECTION("identical populations sit at exactly (1, 1)") {
    const RateRatios id = error_rate_ratios(overall, overall, 0.35);
    REQUIRE(id.fpr_ratio.has_value());
    REQUIRE(id.fnr_ratio.has_value());
    CHECK(*id.fpr_ratio == 1.0);
    CHECK(*id.fnr_ratio == 1.0);
  }
}

TEST_CASE("pooled rates are the count-weighted mixture of subgroup rates") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 60; ++rep) {
    const auto parts = random_partition(rng, 2 + rep % 3);
    const auto all = pool(parts);
    const ErrorCurve overall = compute_error_curve(all.targets, all.nontargets);

    std::vector<ErrorCurve> subs;
    for (const auto& p : parts) subs.push_back(compute_error_curve(p.targets, p.nontargets));

    for (double theta : overall.thresholds) {
      double fnr_mix = 0.0, fpr_mix = 0.0;
      for (std::size_t i = 0; i < subs.size(); ++i) {
        const auto r = subs[i].rates_at(theta);
        fnr_mix += r.fnr * static_cast<double>(subs[i].n_target) /
                   static_cast<double>(overall.n_target);
        fpr_mix += r.fpr * static_cast<double>(subs[i].n_nontarget) /
                   static_cast<double>(overall.n_nontarget);
      }
      const auto o = overall.rates_at(theta);
      REQUIRE_THAT(o.fnr, WithinAbs(fnr_mix, 1e-12));
      REQUIRE_THAT(o.fpr, WithinAbs(fpr_mix, 1e-12));
    }
  }
}

TEST_CASE("metrics depend only on score ranks") {
  const CostParams d;
  const auto cube = [](double x) { return x * x * x + 2.0 * x; };
  const auto arc = [](double x) { return std::atan(x); };

  std::mt19937_64 rng(57);
  for (int rep = 0; rep < 40; ++rep) {
    const auto parts = random_partition(rng, 3);
    const auto all = pool(parts);
    const ErrorCurve overall = compute_error_curve(all.targets, all.nontargets);
    if (!(min_detection_cost(overall, d).cost > 0.0)) continue;

    for (const auto transform : {+cube, +arc}) {
      auto mapped_parts = parts;
      for (auto& p : mapped_parts) {
        for (auto& s : p.targets) s = transform(s);
        for (auto& s : p.nontargets) s = transform(s);
      }
      const auto mapped_all = pool(mapped_parts);
      const ErrorCurve mapped_overall =
          compute_error_curve(mapped_all.targets, mapped_all.nontargets);

      CHECK(min_detection_cost(mapped_overall, d).cost ==
            min_detection_cost(overall, d).cost);
      CHECK(equal_error_rate(mapped_overall).eer == equal_error_rate(overall).eer);

      std::vector<double> ratios, mapped_ratios;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const ErrorCurve sub =
            compute_error_curve(parts[i].targets, parts[i].nontargets);
        const ErrorCurve mapped_sub =
            compute_error_curve(mapped_parts[i].targets, mapped_parts[i].nontargets);
        const CdetEvaluation e = subgroup_cdet_evaluation(overall, sub, d);
        const CdetEvaluation me = subgroup_cdet_evaluation(mapped_overall, mapped_sub, d);
        CHECK(me.ratio_overall_min == e.ratio_overall_min);
        CHECK(me.ratio_sg_min == e.ratio_sg_min);
        ratios.push_back(e.ratio_overall_min);
        mapped_ratios.push_back(me.ratio_overall_min);
      }
      const auto fi = fairness_index_pair(ratios);
      const auto mapped_fi = fairness_index_pair(mapped_ratios);
      CHECK(mapped_fi.literal == fi.literal);
      CHECK(mapped_fi.sum_of_ratios == fi.sum_of_ratios);
    }
  }
}

namespace {

FairnessReport report_with_ratios(const std::string& model,
                                  const std::vector<std::pair<std::string, double>>& rows) {
  FairnessReport r;
  r.model_name = model;
  std::vector<double> ratios;
  for (const auto& [name, ratio] : rows) {
    SubgroupMetrics m;
    m.subgroup = SubgroupKey{{name}};
    m.n_speakers = 10;
    m.ratio_overall_min = ratio;
    r.subgroups.push_back(std::move(m));
    ratios.push_back(ratio);
  }
  r.fairness_index = fairness_index_pair(ratios);
  return r;
}

}  // namespace

TEST_CASE("model comparison pairs subgroups and sorts by difference") {
  const auto a = report_with_ratios("model_a", {{"g1", 1.5}, {"g2", 0.7}, {"g3", 1.0}});
  const auto b = report_with_ratios("model_b", {{"g1", 1.1}, {"g2", 0.9}, {"g3", 1.0}});

  const auto rows = compare_models(a, b);
  REQUIRE(rows.size() == 3);
  // Differences: g1 +0.4, g2 -0.2, g3 0.0 -> sorted ascending.
  CHECK(rows[0].subgroup.display() == "g2");
  CHECK_THAT(rows[0].difference, WithinAbs(-0.2, 1e-12));
  CHECK(rows[1].subgroup.display() == "g3");
  CHECK(rows[1].difference == 0.0);
  CHECK(rows[2].subgroup.display() == "g1");
  CHECK_THAT(rows[2].difference, WithinAbs(0.4, 1e-12));

  SECTION("self-comparison is all zeros") {
    for (const auto& row : compare_models(a, a)) CHECK(row.difference == 0.0);
  }

  SECTION("mismatched subgroup sets are named in the error") {
    const auto c = report_with_ratios("model_c", {{"g1", 1.0}, {"g4", 1.0}});
    CHECK_THROWS_WITH(compare_models(a, c),
                      ContainsSubstring("only in model_a:") &&
                          ContainsSubstring("g2") && ContainsSubstring("g3") &&
                          ContainsSubstring("only in model_c:") &&
                          ContainsSubstring("g4"));
  }

  SECTION("ties in difference fall back to the subgroup key") {
    const auto t1 = report_with_ratios("x", {{"zz", 1.0}, {"aa", 1.0}});
    const auto t2 = report_with_ratios("y", {{"zz", 1.0}, {"aa", 1.0}});
    const auto tied = compare_models(t1, t2);
    CHECK(tied[0].subgroup.display() == "aa");
    CHECK(tied[1].subgroup.display() == "zz");
  }
}

TEST_CASE("grouped evaluation assembles the full report") {
  std::istringstream meta_stream(
      "speaker_id,nationality,sex\n"
      "a1,india,f\na2,india,f\nb1,usa,m\nb2,usa,m\n");
  const Metadata metadata = parse_metadata(meta_stream);

  std::vector<TrialRecord> trials;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> tgt(2.0, 1.0), non(-2.0, 1.0), shifted(0.0, 1.0);
  for (int i = 0; i < 60; ++i) {
    trials.push_back({"a1", "a1", true, tgt(rng)});
    trials.push_back({"a1", "a2", false, shifted(rng)});
    trials.push_back({"b1", "b1", true, tgt(rng)});
    trials.push_back({"b1", "b2", false, non(rng)});
  }
  const auto grouped = assign_subgroups(trials, metadata, {"nationality", "sex"},
                                        GroupPolicy::kRequireSame);

  EvaluationOptions opt;
  opt.model_name = "synthetic";
  const EvaluationBundle bundle = evaluate_grouped(grouped, opt);
  const FairnessReport& r = bundle.report;

  CHECK(r.model_name == "synthetic");
  REQUIRE(r.subgroups.size() == 2);
  CHECK(r.overall.n_target_trials == 120);
  CHECK(r.overall.n_nontarget_trials == 120);
  CHECK(r.subgroups[0].subgroup.display() == "india_f");
  CHECK(r.subgroups[1].subgroup.display() == "usa_m");

  // The india_f nontarget lobe is shifted toward the targets, so it must look
  // worse than the pool while usa_m looks better.
  CHECK(r.subgroups[0].ratio_overall_min > 1.0);
  CHECK(r.subgroups[1].ratio_overall_min < 1.0);
  CHECK(r.fairness_index.contributing == 1);

  SECTION("report ratios agree with a direct recomputation") {
    std::vector<double> ratios;
    for (const auto& m : r.subgroups) ratios.push_back(m.ratio_overall_min);
    CHECK(fairness_index_pair(ratios) == r.fairness_index);
  }

  SECTION("a subgroup without nontargets fails by name") {
    std::vector<TrialRecord> bad = trials;
    // Strip india_f nontargets: every remaining india trial is a target.
    bad.erase(std::remove_if(bad.begin(), bad.end(),
                             [](const TrialRecord& t) {
                               return t.enroll_id == "a1" && !t.is_target;
                             }),
              bad.end());
    const auto g = assign_subgroups(bad, metadata, {"nationality", "sex"},
                                    GroupPolicy::kRequireSame);
    CHECK_THROWS_WITH(evaluate_grouped(g, opt),
                      ContainsSubstring("india_f") && ContainsSubstring("nontarget"));
  }

  SECTION("no surviving trials fails") {
    GroupedTrials empty;
    CHECK_THROWS_WITH(evaluate_grouped(empty, opt), ContainsSubstring("no trials"));
  }
}
