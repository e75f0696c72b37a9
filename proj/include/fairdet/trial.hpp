// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Core data model: scored trials, speaker attributes, subgroup assignment
// keys, and the grouped view the metrics layer consumes.

#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace fairdet {

// One scored verification trial: an enrollment identity, a test utterance's
// claimed identity, the ground-truth label, and the system's score (higher
// means "same speaker").
struct TrialRecord {
  std::string enroll_id;
  std::string test_id;
  bool is_target = false;
  double score = 0.0;

  bool operator==(const TrialRecord&) const = default;
};

// Attribute values for one speaker, keyed by attribute name.
struct SpeakerAttributes {
  std::map<std::string, std::string> values;
};

// Speaker metadata table. `attribute_names` preserves the header order of the
// source file; `speakers` maps speaker id -> attributes.
struct Metadata {
  std::vector<std::string> attribute_names;
  std::map<std::string, SpeakerAttributes> speakers;
};

// A subgroup key is the tuple of attribute values selected by --group-by,
// in the order the attributes were requested.
struct SubgroupKey {
  std::vector<std::string> values;

  // Canonical display form: values joined with '_' (e.g. "india_f").
  std::string display() const {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out += '_';
      out += values[i];
    }
    return out;
  }

  bool operator<(const SubgroupKey& o) const { return values < o.values; }
  bool operator==(const SubgroupKey& o) const { return values == o.values; }
};

// How a trial (which touches two speakers) maps to a subgroup.
enum class GroupPolicy {
  kEnrollSpeaker,  // subgroup of the enrollment speaker decides
  kRequireSame,    // both speakers must share the subgroup; mismatch is an error
  kExcludeMixed,   // mismatched trials are silently dropped (counted)
};

// Per-subgroup slice of trials plus the speakers that contributed to it.
struct SubgroupTrials {
  std::vector<TrialRecord> trials;
  std::set<std::string> speakers;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
};

// Result of assign_subgroups. `overall` is the union of the subgroup slices
// (trials surviving assignment, in file order); `excluded_count` counts
// trials dropped for missing metadata or, under kExcludeMixed, for crossing
// subgroup boundaries. Assigned + excluded = parsed.
struct GroupedTrials {
  std::vector<std::string> group_by;               // attribute names used
  GroupPolicy policy = GroupPolicy::kEnrollSpeaker;
  std::vector<TrialRecord> overall;
  std::map<SubgroupKey, SubgroupTrials> by_subgroup;
  std::size_t excluded_count = 0;
};

struct SubgroupCounts {
  std::size_t n_speakers = 0;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
};

// Dataset-level sanity summary from validate_dataset.
struct DatasetSummary {
  std::size_t n_trials = 0;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
  std::size_t excluded_count = 0;
  std::map<SubgroupKey, SubgroupCounts> per_subgroup;
  std::vector<std::string> warnings;
};

}  // namespace fairdet
