// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Seeded synthetic trial generation plus independent brute-force oracles for
// the test suite.
//
// Determinism contract: scores come from std::mt19937_64 (a fully specified
// engine) fed through the trigonometric Box-Muller transform -- NOT
// std::normal_distribution, whose algorithm is implementation-defined.
// Speaker and pair assignment is round-robin index arithmetic, so the trial
// structure never consumes randomness. Same spec + same seed = same bytes.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairdet/cost.hpp"
#include "fairdet/error.hpp"
#include "fairdet/ingest.hpp"
#include "fairdet/trial.hpp"

namespace fairdet {

struct NormalSpec {
  double mean = 0.0;
  double sd = 1.0;
};

struct SubgroupScoreSpec {
  SubgroupKey subgroup;
  NormalSpec target;
  NormalSpec nontarget;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
  std::size_t n_speakers = 8;
};

struct SynthSpec {
  std::vector<std::string> attributes;
  std::vector<SubgroupScoreSpec> subgroups;

  void validate() const {
    if (attributes.empty()) throw DataError("synth spec: no attributes");
    if (subgroups.empty()) throw DataError("synth spec: no subgroups");
    std::vector<SubgroupKey> seen;
    for (const auto& g : subgroups) {
      const std::string name = g.subgroup.display();
      if (g.subgroup.values.size() != attributes.size())
        throw DataError("synth spec: subgroup '" + name + "' has " +
                        std::to_string(g.subgroup.values.size()) + " values for " +
                        std::to_string(attributes.size()) + " attributes");
      if (!(g.target.sd > 0.0) || !(g.nontarget.sd > 0.0))
        throw DataError("synth spec: subgroup '" + name + "' needs sd > 0");
      if (g.n_target == 0 || g.n_nontarget == 0)
        throw DataError("synth spec: subgroup '" + name +
                        "' needs n_target >= 1 and n_nontarget >= 1");
      if (g.n_speakers == 0)
        throw DataError("synth spec: subgroup '" + name + "' needs n_speakers >= 1");
      if (g.n_speakers < 2 && g.n_nontarget > 0)
        throw DataError("synth spec: subgroup '" + name +
                        "' needs at least 2 speakers for nontarget pairs");
      if (std::find(seen.begin(), seen.end(), g.subgroup) != seen.end())
        throw DataError("synth spec: duplicate subgroup '" + name + "'");
      seen.push_back(g.subgroup);
    }
  }
};

// Standard-normal sampler: mt19937_64 + trigonometric Box-Muller, with the
// usual pair caching. u1 is mapped into (0,1] so log(u1) is always finite.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double standard() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((rng_() >> 11) + 1) * 0x1p-53;  // (0,1]
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1p-53;        // [0,1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

  double normal(const NormalSpec& spec) { return spec.mean + spec.sd * standard(); }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

struct SynthOutput {
  std::vector<TrialRecord> trials;
  Metadata metadata;
};

// Deterministic dataset synthesis. Speaker ids are "g<group>s<speaker>";
// target trials pair a speaker with itself round-robin; nontarget trials walk
// distinct same-subgroup pairs round-robin, so every generated dataset passes
// subgroup assignment under any policy (all pairs are same-subgroup).
inline SynthOutput generate_trials(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  GaussianSampler sampler(seed);
  SynthOutput out;
  out.metadata.attribute_names = spec.attributes;

  for (std::size_t gi = 0; gi < spec.subgroups.size(); ++gi) {
    const auto& g = spec.subgroups[gi];
    std::vector<std::string> ids;
    ids.reserve(g.n_speakers);
    for (std::size_t k = 0; k < g.n_speakers; ++k) {
      std::string id = "g" + std::to_string(gi) + "s" + std::to_string(k);
      SpeakerAttributes attrs;
      for (std::size_t a = 0; a < spec.attributes.size(); ++a)
        attrs.values[spec.attributes[a]] = g.subgroup.values[a];
      out.metadata.speakers.emplace(id, std::move(attrs));
      ids.push_back(std::move(id));
    }

    for (std::size_t t = 0; t < g.n_target; ++t) {
      TrialRecord trial;
      trial.enroll_id = ids[t % g.n_speakers];
      trial.test_id = trial.enroll_id;
      trial.is_target = true;
      trial.score = sampler.normal(g.target);
      out.trials.push_back(std::move(trial));
    }
    for (std::size_t t = 0; t < g.n_nontarget; ++t) {
      const std::size_t a = t % g.n_speakers;
      const std::size_t offset = 1 + (t / g.n_speakers) % (g.n_speakers - 1);
      TrialRecord trial;
      trial.enroll_id = ids[a];
      trial.test_id = ids[(a + offset) % g.n_speakers];
      trial.is_target = false;
      trial.score = sampler.normal(g.nontarget);
      out.trials.push_back(std::move(trial));
    }
  }
  return out;
}

// Spec file layout:
//   { "attributes": ["nationality","sex"],
//     "subgroups": [ { "values": ["india","f"],
//                      "target": {"mean": 2.0, "sd": 1.0},
//                      "nontarget": {"mean": -2.0, "sd": 1.0},
//                      "n_target": 100, "n_nontarget": 100,
//                      "n_speakers": 8 } ] }
// n_speakers is optional (default 8). Values are lowercased like metadata.
inline SynthSpec parse_synth_spec(const std::string& text,
                                  const std::string& source_name = "<synth spec>") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source_name + ": not valid JSON: " + e.what());
  }

  const auto fail = [&](const std::string& msg) -> ParseError {
    return ParseError(source_name + ": " + msg);
  };
  if (!j.is_object()) throw fail("top level must be an object");
  if (!j.contains("attributes") || !j["attributes"].is_array())
    throw fail("'attributes' must be an array of strings");
  if (!j.contains("subgroups") || !j["subgroups"].is_array())
    throw fail("'subgroups' must be an array");

  SynthSpec spec;
  for (const auto& a : j["attributes"]) {
    if (!a.is_string()) throw fail("'attributes' must hold strings");
    spec.attributes.push_back(a.get<std::string>());
  }

  const auto get_normal = [&](const nlohmann::json& g, const char* key) {
    if (!g.contains(key) || !g[key].is_object() || !g[key].contains("mean") ||
        !g[key].contains("sd") || !g[key]["mean"].is_number() || !g[key]["sd"].is_number())
      throw fail(std::string("subgroup '") + key + "' must be {\"mean\": F, \"sd\": F}");
    return NormalSpec{g[key]["mean"].get<double>(), g[key]["sd"].get<double>()};
  };
  const auto get_count = [&](const nlohmann::json& g, const char* key,
                             bool required, std::size_t fallback) -> std::size_t {
    if (!g.contains(key)) {
      if (required) throw fail(std::string("subgroup field '") + key + "' is required");
      return fallback;
    }
    if (!g[key].is_number_unsigned())
      throw fail(std::string("subgroup field '") + key + "' must be a nonnegative integer");
    return g[key].get<std::size_t>();
  };

  for (const auto& g : j["subgroups"]) {
    if (!g.is_object()) throw fail("'subgroups' entries must be objects");
    SubgroupScoreSpec s;
    if (!g.contains("values") || !g["values"].is_array())
      throw fail("subgroup field 'values' must be an array of strings");
    for (const auto& v : g["values"]) {
      if (!v.is_string()) throw fail("subgroup 'values' must hold strings");
      s.subgroup.values.push_back(detail::lowercase(v.get<std::string>()));
    }
    s.target = get_normal(g, "target");
    s.nontarget = get_normal(g, "nontarget");
    s.n_target = get_count(g, "n_target", true, 0);
    s.n_nontarget = get_count(g, "n_nontarget", true, 0);
    s.n_speakers = get_count(g, "n_speakers", false, 8);
    spec.subgroups.push_back(std::move(s));
  }
  spec.validate();
  return spec;
}

// --- Brute-force oracles (deliberately independent of the curve code) ---

namespace oracle {

struct BruteMin {
  double threshold = 0.0;
  double cost = 0.0;
};

// Evaluates the detection cost by direct counting at every sentinel, every
// observed score, and every midpoint between consecutive distinct pooled
// scores; returns the global minimum (smallest threshold on ties). Midpoints
// cannot beat the candidate set -- rates are constant between observed
// scores -- which is exactly what the equivalence tests pin down.
inline BruteMin brute_force_min_cost(std::span<const double> targets,
                                     std::span<const double> nontargets,
                                     const CostParams& params) {
  if (targets.empty() || nontargets.empty())
    throw DataError("brute force: empty population");
  std::vector<double> pooled(targets.begin(), targets.end());
  pooled.insert(pooled.end(), nontargets.begin(), nontargets.end());
  std::sort(pooled.begin(), pooled.end());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  std::vector<double> candidates;
  candidates.push_back(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    candidates.push_back(pooled[i]);
    if (i + 1 < pooled.size()) candidates.push_back((pooled[i] + pooled[i + 1]) / 2.0);
  }
  candidates.push_back(std::numeric_limits<double>::infinity());

  BruteMin best;
  bool first = true;
  for (double theta : candidates) {
    std::size_t fn = 0, fp = 0;
    for (double s : targets)
      if (s < theta) ++fn;
    for (double s : nontargets)
      if (s >= theta) ++fp;
    const double fnr = static_cast<double>(fn) / static_cast<double>(targets.size());
    const double fpr = static_cast<double>(fp) / static_cast<double>(nontargets.size());
    const double cost = params.c_fn * params.p_target * fnr +
                        params.c_fp * (1.0 - params.p_target) * fpr;
    if (first || cost < best.cost) {
      best.cost = cost;
      best.threshold = theta;
      first = false;
    }
  }
  return best;
}

// Independent EER: direct counting at every candidate, first index where
// FNR >= FPR, exact value on equality, otherwise the linear interpolation of
// the bracketing (FPR, FNR) points.
inline double brute_force_eer(std::span<const double> targets,
                              std::span<const double> nontargets) {
  if (targets.empty() || nontargets.empty())
    throw DataError("brute force: empty population");
  std::vector<double> pooled(targets.begin(), targets.end());
  pooled.insert(pooled.end(), nontargets.begin(), nontargets.end());
  std::sort(pooled.begin(), pooled.end());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  std::vector<double> candidates;
  candidates.push_back(-std::numeric_limits<double>::infinity());
  candidates.insert(candidates.end(), pooled.begin(), pooled.end());
  candidates.push_back(std::numeric_limits<double>::infinity());

  double prev_fnr = 0.0, prev_fpr = 1.0;
  for (double theta : candidates) {
    std::size_t fn = 0, fp = 0;
    for (double s : targets)
      if (s < theta) ++fn;
    for (double s : nontargets)
      if (s >= theta) ++fp;
    const double fnr = static_cast<double>(fn) / static_cast<double>(targets.size());
    const double fpr = static_cast<double>(fp) / static_cast<double>(nontargets.size());
    if (fnr == fpr) return fnr;
    if (fnr > fpr) {
      const double d0 = prev_fpr - prev_fnr;
      const double d1 = fnr - fpr;
      const double t = d0 / (d0 + d1);
      return (1.0 - t) * prev_fpr + t * fpr;
    }
    prev_fnr = fnr;
    prev_fpr = fpr;
  }
  throw DataError("brute force: no crossing found");
}

}  // namespace oracle

}  // namespace fairdet
