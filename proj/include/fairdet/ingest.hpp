// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Input parsing and subgroup assignment.
//
// Two score formats are accepted:
//   csv       header `enroll_id,test_id,label,score`, label in {0,1}
//   voxceleb  whitespace lines `<label> <enroll_path> <test_path> <score>`,
//             speaker id = path segment before the first '/'
// Speaker metadata is CSV with header `speaker_id,<attr1>,<attr2>,...`;
// attribute values are lowercased on input so grouping is case-insensitive.

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fairdet/error.hpp"
#include "fairdet/trial.hpp"

namespace fairdet {

enum class ScoreFormat { kCsv, kVoxceleb };

namespace detail {

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Strict double parse: the whole token must be consumed and the value finite.
inline double parse_score(std::string_view tok, const std::string& where) {
  double v = 0.0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError(where + ": score is not a decimal literal: '" +
                     std::string(tok) + "'");
  if (!std::isfinite(v))
    throw ParseError(where + ": score must be finite, got '" + std::string(tok) + "'");
  return v;
}

inline bool parse_label(std::string_view tok, const std::string& where) {
  if (tok == "1") return true;
  if (tok == "0") return false;
  throw ParseError(where + ": label must be 0 or 1, got '" + std::string(tok) + "'");
}

inline std::string speaker_from_path(std::string_view path, const std::string& where) {
  const std::size_t slash = path.find('/');
  const std::string_view id = (slash == std::string_view::npos) ? path : path.substr(0, slash);
  if (id.empty()) throw ParseError(where + ": empty speaker id in path '" + std::string(path) + "'");
  return std::string(id);
}

}  // namespace detail

// Parses a score file. `source_name` is used in diagnostics only.
inline std::vector<TrialRecord> parse_scores(std::istream& in, ScoreFormat format,
                                             const std::string& source_name = "<scores>") {
  std::vector<TrialRecord> trials;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = (format == ScoreFormat::kVoxceleb);  // voxceleb has no header
  bool saw_any = false;

  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    saw_any = true;
    const std::string where = source_name + " line " + std::to_string(line_no);

    if (format == ScoreFormat::kCsv) {
      if (!saw_header) {
        if (line != "enroll_id,test_id,label,score")
          throw ParseError(where + ": expected header 'enroll_id,test_id,label,score', got '" +
                           line + "'");
        saw_header = true;
        continue;
      }
      const auto fields = detail::split_csv(line);
      if (fields.size() != 4)
        throw ParseError(where + ": expected 4 fields, got " + std::to_string(fields.size()));
      if (fields[0].empty() || fields[1].empty())
        throw ParseError(where + ": empty speaker id");
      TrialRecord t;
      t.enroll_id = fields[0];
      t.test_id = fields[1];
      t.is_target = detail::parse_label(fields[2], where);
      t.score = detail::parse_score(fields[3], where);
      trials.push_back(std::move(t));
    } else {
      std::istringstream iss(line);
      std::string label, enroll_path, test_path, score, extra;
      if (!(iss >> label >> enroll_path >> test_path >> score) || (iss >> extra))
        throw ParseError(where + ": expected '<label> <enroll_path> <test_path> <score>'");
      TrialRecord t;
      t.is_target = detail::parse_label(label, where);
      t.enroll_id = detail::speaker_from_path(enroll_path, where);
      t.test_id = detail::speaker_from_path(test_path, where);
      t.score = detail::parse_score(score, where);
      trials.push_back(std::move(t));
    }
  }

  if (!saw_any) throw ParseError(source_name + ": empty file");
  if (trials.empty()) throw ParseError(source_name + ": no trial rows");
  return trials;
}

// Parses speaker metadata CSV. Attribute names come from the header;
// attribute values are lowercased.
inline Metadata parse_metadata(std::istream& in,
                               const std::string& source_name = "<metadata>") {
  Metadata meta;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const std::string where = source_name + " line " + std::to_string(line_no);

    const auto fields = detail::split_csv(line);
    if (!saw_header) {
      if (fields.empty() || fields[0] != "speaker_id")
        throw ParseError(where + ": header must start with 'speaker_id'");
      if (fields.size() < 2)
        throw ParseError(where + ": no attribute columns");
      meta.attribute_names.assign(fields.begin() + 1, fields.end());
      saw_header = true;
      continue;
    }
    if (fields.size() != meta.attribute_names.size() + 1)
      throw ParseError(where + ": expected " +
                       std::to_string(meta.attribute_names.size() + 1) + " fields, got " +
                       std::to_string(fields.size()));
    if (fields[0].empty()) throw ParseError(where + ": empty speaker_id");
    if (meta.speakers.count(fields[0]))
      throw ParseError(where + ": duplicate speaker_id '" + fields[0] + "'");

    SpeakerAttributes attrs;
    for (std::size_t i = 0; i < meta.attribute_names.size(); ++i) {
      if (fields[i + 1].empty())
        throw ParseError(where + ": missing value for attribute '" +
                         meta.attribute_names[i] + "'");
      attrs.values[meta.attribute_names[i]] = detail::lowercase(fields[i + 1]);
    }
    meta.speakers.emplace(fields[0], std::move(attrs));
  }

  if (!saw_header) throw ParseError(source_name + ": empty file");
  if (meta.speakers.empty()) throw ParseError(source_name + ": no speaker rows");
  return meta;
}

namespace detail {

// Subgroup key of one speaker under the requested attributes; the speaker is
// assumed present in meta.
inline SubgroupKey subgroup_of(const SpeakerAttributes& attrs,
                               const std::vector<std::string>& group_by) {
  SubgroupKey key;
  key.values.reserve(group_by.size());
  for (const auto& name : group_by) key.values.push_back(attrs.values.at(name));
  return key;
}

}  // namespace detail

// Assigns each trial to a demographic subgroup. Trials referencing a speaker
// absent from the metadata are excluded (and counted), whatever the policy.
inline GroupedTrials assign_subgroups(const std::vector<TrialRecord>& trials,
                                      const Metadata& meta,
                                      const std::vector<std::string>& group_by,
                                      GroupPolicy policy) {
  if (group_by.empty()) throw DataError("assign_subgroups: no grouping attributes given");
  for (const auto& name : group_by) {
    if (std::find(meta.attribute_names.begin(), meta.attribute_names.end(), name) ==
        meta.attribute_names.end())
      throw DataError("assign_subgroups: attribute '" + name +
                      "' not present in metadata header");
  }

  GroupedTrials out;
  out.group_by = group_by;
  out.policy = policy;

  for (const auto& trial : trials) {
    const auto enroll_it = meta.speakers.find(trial.enroll_id);
    const auto test_it = meta.speakers.find(trial.test_id);
    if (enroll_it == meta.speakers.end() || test_it == meta.speakers.end()) {
      ++out.excluded_count;
      continue;
    }
    const SubgroupKey enroll_key = detail::subgroup_of(enroll_it->second, group_by);
    const SubgroupKey test_key = detail::subgroup_of(test_it->second, group_by);

    if (!(enroll_key == test_key)) {
      switch (policy) {
        case GroupPolicy::kEnrollSpeaker:
          break;  // enroll speaker decides
        case GroupPolicy::kRequireSame:
          throw DataError("assign_subgroups: trial (" + trial.enroll_id + ", " +
                          trial.test_id + ") crosses subgroups '" + enroll_key.display() +
                          "' and '" + test_key.display() + "' under policy require_same");
        case GroupPolicy::kExcludeMixed:
          ++out.excluded_count;
          continue;
      }
    }

    auto& slot = out.by_subgroup[enroll_key];
    slot.trials.push_back(trial);
    if (trial.is_target) ++slot.n_target; else ++slot.n_nontarget;
    slot.speakers.insert(trial.enroll_id);
    if (test_key == enroll_key) slot.speakers.insert(trial.test_id);
    out.overall.push_back(trial);
  }
  return out;
}

// Counts and warnings; never throws. Degenerate subgroups (no targets, no
// nontargets) warn here and fail later in the metric layer.
inline DatasetSummary validate_dataset(const GroupedTrials& grouped,
                                       std::size_t min_speakers = 5) {
  DatasetSummary s;
  s.n_trials = grouped.overall.size();
  s.excluded_count = grouped.excluded_count;
  for (const auto& t : grouped.overall) {
    if (t.is_target) ++s.n_target; else ++s.n_nontarget;
  }
  for (const auto& [key, slice] : grouped.by_subgroup) {
    SubgroupCounts c;
    c.n_speakers = slice.speakers.size();
    c.n_target = slice.n_target;
    c.n_nontarget = slice.n_nontarget;
    s.per_subgroup.emplace(key, c);
    const std::string name = key.display();
    if (c.n_speakers < min_speakers)
      s.warnings.push_back("subgroup " + name + " has " + std::to_string(c.n_speakers) +
                           " speakers (below " + std::to_string(min_speakers) + ")");
    if (c.n_target == 0)
      s.warnings.push_back("subgroup " + name + " has no target trials");
    if (c.n_nontarget == 0)
      s.warnings.push_back("subgroup " + name + " has no nontarget trials");
  }
  return s;
}

// --- Writers (used by the synthetic generator; formats mirror the parsers) ---

namespace detail {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace detail

inline void write_scores_csv(std::ostream& out, const std::vector<TrialRecord>& trials) {
  out << "enroll_id,test_id,label,score\n";
  for (const auto& t : trials)
    out << t.enroll_id << ',' << t.test_id << ',' << (t.is_target ? '1' : '0') << ','
        << detail::format_double(t.score) << '\n';
}

inline void write_metadata_csv(std::ostream& out, const Metadata& meta) {
  out << "speaker_id";
  for (const auto& name : meta.attribute_names) out << ',' << name;
  out << '\n';
  for (const auto& [id, attrs] : meta.speakers) {
    out << id;
    for (const auto& name : meta.attribute_names) out << ',' << attrs.values.at(name);
    out << '\n';
  }
}

}  // namespace fairdet
