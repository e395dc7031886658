// Copyright 2026 The Rulewise Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rulewise/rule_engine.h"

#include <algorithm>
#include <set>

#include "json_util.h"
#include "rulewise/error.h"
#include "rulewise/rng.h"
#include "rulewise/workspace.h"

namespace rulewise {

using internal::Json;

LinguisticExpression::LinguisticExpression(std::vector<int> predicate_ids,
                                           ExpressionId id)
    : predicate_ids_(std::move(predicate_ids)), id_(id) {
  if (predicate_ids_.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "an expression needs at least one predicate");
  }
  std::sort(predicate_ids_.begin(), predicate_ids_.end());
  if (std::adjacent_find(predicate_ids_.begin(), predicate_ids_.end()) !=
      predicate_ids_.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "duplicate predicate in expression");
  }
}

bool LinguisticExpression::Contains(int predicate_id) const {
  return std::binary_search(predicate_ids_.begin(), predicate_ids_.end(),
                            predicate_id);
}

void RuleSet::Add(LinguisticExpression expression) {
  if (auto existing = FindBody(expression)) {
    throw Error(ErrorCode::kAlreadyExists,
                "expression duplicates rule " + std::to_string(*existing));
  }
  expressions_.push_back(std::move(expression));
}

std::optional<ExpressionId> RuleSet::FindBody(
    const LinguisticExpression &e) const {
  for (const auto &member : expressions_) {
    if (member == e) return member.id();
  }
  return std::nullopt;
}

Metrics Metrics::FromCounts(int tp, int fp, int fn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
  m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
  const double sum = m.precision + m.recall;
  m.f1 = sum == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / sum;
  return m;
}

double MetricValue(const Metrics &metrics, MetricKey key) {
  switch (key) {
    case MetricKey::kPrecision: return metrics.precision;
    case MetricKey::kRecall: return metrics.recall;
    case MetricKey::kF1: return metrics.f1;
  }
  return 0.0;
}

const char *MetricKeyName(MetricKey key) {
  switch (key) {
    case MetricKey::kPrecision: return "precision";
    case MetricKey::kRecall: return "recall";
    case MetricKey::kF1: return "f1";
  }
  return "f1";
}

MetricKey ParseMetricKey(std::string_view name) {
  if (name == "precision") return MetricKey::kPrecision;
  if (name == "recall") return MetricKey::kRecall;
  if (name == "f1") return MetricKey::kF1;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown metric \"" + std::string(name) + "\"");
}

namespace {

std::vector<std::string_view> SplitConjunction(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument, "empty expression");
  }
  if (text.starts_with("AND ") || text.ends_with(" AND")) {
    throw Error(ErrorCode::kInvalidArgument, "dangling AND in expression");
  }
  std::vector<std::string_view> parts;
  for (;;) {
    size_t pos = text.find(kAndConnective);
    std::string_view part = text.substr(0, pos);
    if (part.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "empty predicate in expression");
    }
    parts.push_back(part);
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + kAndConnective.size());
  }
  return parts;
}

}  // namespace

std::vector<PredicateKey> ParseExpressionKeys(std::string_view text) {
  std::vector<PredicateKey> keys;
  for (auto part : SplitConjunction(text)) {
    keys.push_back(PredicateKey::Parse(part));
  }
  return keys;
}

LinguisticExpression ParseExpression(std::string_view text,
                                     const PredicateCatalog &catalog) {
  std::vector<int> ids;
  std::set<int> seen;
  for (const auto &key : ParseExpressionKeys(text)) {
    const std::string name = key.DisplayName();
    auto id = catalog.Find(name);
    if (!id) {
      throw Error(ErrorCode::kNotFound, "unknown predicate " + name);
    }
    if (!seen.insert(*id).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate predicate " + name);
    }
    ids.push_back(*id);
  }
  return LinguisticExpression(std::move(ids));
}

std::string RenderExpression(const LinguisticExpression &expression,
                             const PredicateCatalog &catalog) {
  std::string out;
  for (int id : expression.predicate_ids()) {
    if (id < 0 || static_cast<size_t>(id) >= catalog.size()) {
      throw Error(ErrorCode::kNotFound,
                  "predicate id " + std::to_string(id) + " not in catalog");
    }
    if (!out.empty()) out += kAndConnective;
    out += catalog.at(id).display_name;
  }
  return out;
}

MatchSet EvalExpression(const LinguisticExpression &expression,
                        const MatchIndex &index) {
  const auto &ids = expression.predicate_ids();
  MatchSet matches = index.matches(ids.front());
  for (size_t i = 1; i < ids.size(); ++i) matches &= index.matches(ids[i]);
  return matches;
}

MatchSet EvalRuleSet(std::span<const LinguisticExpression> expressions,
                     const MatchIndex &index) {
  MatchSet matches(index.corpus_size());
  for (const auto &e : expressions) matches |= EvalExpression(e, index);
  return matches;
}

Metrics ComputeMetrics(const MatchSet &matches, const MatchIndex &index) {
  const int matched = static_cast<int>(matches.Count());
  const int tp = static_cast<int>(matches.IntersectCount(index.labels()));
  return Metrics::FromCounts(tp, matched - tp, index.positives() - tp);
}

std::vector<ScoredRule> ScoreRules(
    std::span<const LinguisticExpression> expressions, const MatchIndex &index) {
  std::vector<ScoredRule> scored;
  scored.reserve(expressions.size());
  for (const auto &e : expressions) {
    scored.push_back({e, ComputeMetrics(EvalExpression(e, index), index)});
  }
  return scored;
}

std::vector<ScoredRule> RankRules(std::vector<ScoredRule> rules, MetricKey key) {
  std::stable_sort(rules.begin(), rules.end(),
                   [key](const ScoredRule &a, const ScoredRule &b) {
                     const double va = MetricValue(a.metrics, key);
                     const double vb = MetricValue(b.metrics, key);
                     if (va != vb) return va > vb;
                     if (a.expression.size() != b.expression.size()) {
                       return a.expression.size() < b.expression.size();
                     }
                     return a.expression.id() < b.expression.id();
                   });
  return rules;
}

std::vector<ScoredRule> FilterRules(std::vector<ScoredRule> rules,
                                    const RuleFilter &filter) {
  std::erase_if(rules, [&](const ScoredRule &rule) {
    for (const auto &[key, min] : filter.min_metric) {
      if (MetricValue(rule.metrics, key) < min) return true;
    }
    for (int p : filter.required_predicates) {
      if (!rule.expression.Contains(p)) return true;
    }
    for (int p : filter.excluded_predicates) {
      if (rule.expression.Contains(p)) return true;
    }
    return false;
  });
  return rules;
}

DeltaReport ComputeDelta(const RuleSet &approved,
                         const LinguisticExpression &candidate,
                         const MatchIndex &index) {
  if (auto existing = approved.FindBody(candidate)) {
    throw Error(ErrorCode::kAlreadyExists,
                "candidate is already approved as rule " +
                    std::to_string(*existing));
  }
  return ComputeDelta(EvalRuleSet(approved, index), candidate, index);
}

DeltaReport ComputeDelta(const MatchSet &approved_matches,
                         const LinguisticExpression &candidate,
                         const MatchIndex &index) {
  const MatchSet candidate_matches = EvalExpression(candidate, index);
  const MatchSet fresh = Difference(candidate_matches, approved_matches);
  DeltaReport report;
  report.base_metrics = ComputeMetrics(approved_matches, index);
  report.combined_metrics =
      ComputeMetrics(approved_matches | candidate_matches, index);
  report.delta_tp = static_cast<int>(fresh.IntersectCount(index.labels()));
  report.delta_fp = static_cast<int>(fresh.Count()) - report.delta_tp;
  report.new_match_ids = fresh.ToIds();
  return report;
}

LinguisticExpression DropPredicate(const LinguisticExpression &expression,
                                   int predicate_id) {
  if (!expression.Contains(predicate_id)) {
    throw Error(ErrorCode::kNotFound, "predicate " +
                                          std::to_string(predicate_id) +
                                          " is not in the expression");
  }
  if (expression.size() == 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot drop the last predicate of an expression");
  }
  std::vector<int> ids;
  for (int p : expression.predicate_ids()) {
    if (p != predicate_id) ids.push_back(p);
  }
  return LinguisticExpression(std::move(ids));
}

LinguisticExpression AddPredicate(const LinguisticExpression &expression,
                                  int predicate_id) {
  if (expression.Contains(predicate_id)) {
    throw Error(ErrorCode::kAlreadyExists, "predicate " +
                                               std::to_string(predicate_id) +
                                               " is already in the expression");
  }
  std::vector<int> ids = expression.predicate_ids();
  ids.push_back(predicate_id);
  return LinguisticExpression(std::move(ids));
}

std::vector<DiffExample> DiffExamples(const LinguisticExpression &before,
                                      const LinguisticExpression &after,
                                      const MatchIndex &index, size_t k,
                                      uint64_t seed) {
  const MatchSet a = EvalExpression(before, index);
  const MatchSet b = EvalExpression(after, index);
  const MatchSet changed = a ^ b;
  std::vector<DiffExample> diff;
  changed.ForEach([&](size_t s) {
    diff.push_back({static_cast<int>(s), b.Test(s)});
  });
  if (diff.size() > k) {
    Rng rng(seed);
    rng.ShufflePrefix(std::span<DiffExample>(diff), k);
    diff.resize(k);
    std::sort(diff.begin(), diff.end(),
              [](const DiffExample &x, const DiffExample &y) {
                return x.sentence_id < y.sentence_id;
              });
  }
  return diff;
}

ExampleSample SampleExamples(const LinguisticExpression &expression,
                             const Workspace &workspace, uint64_t seed) {
  const MatchIndex &index = workspace.index();
  const MatchSet matches = EvalExpression(expression, index);
  std::vector<int> tp = (matches & index.labels()).ToIds();
  std::vector<int> fp = Difference(matches, index.labels()).ToIds();

  Rng rng(seed);
  auto draw = [&](std::vector<int> &ids) {
    rng.ShufflePrefix(std::span<int>(ids), kExamplesPerClass);
    if (ids.size() > kExamplesPerClass) ids.resize(kExamplesPerClass);
    std::sort(ids.begin(), ids.end());
    std::vector<ExampleSentence> out;
    for (int id : ids) {
      ExampleSentence example{id, {}};
      const Sentence &sentence = workspace.corpus().sentence(id);
      for (int p : expression.predicate_ids()) {
        auto sites = FindPredicateSites(workspace.catalog().at(p).key, p,
                                        sentence, workspace.dictionaries());
        example.highlights.insert(example.highlights.end(), sites.begin(),
                                  sites.end());
      }
      out.push_back(std::move(example));
    }
    return out;
  };

  ExampleSample sample;
  sample.seed = seed;
  sample.true_positives = draw(tp);
  sample.false_positives = draw(fp);
  return sample;
}

namespace internal {

std::vector<RuleRecord> RuleRecordsFromJson(const Json &rules) {
  if (!rules.is_array()) {
    throw Error(ErrorCode::kInvalidArgument, "\"rules\" must be an array");
  }
  std::vector<RuleRecord> records;
  for (const Json &r : rules) {
    RuleRecord record;
    record.id = internal::GetInt(r, "id");
    record.expression = internal::GetString(r, "expression");
    if (const Json *w = internal::OptionalField(r, "weight")) {
      if (!w->is_number()) {
        throw Error(ErrorCode::kInvalidArgument, "weight must be a number");
      }
      record.weight = w->get<double>();
    }
    records.push_back(std::move(record));
  }
  return records;
}

Json RuleRecordsToJson(std::span<const RuleRecord> rules) {
  Json arr = Json::array();
  for (const auto &r : rules) {
    arr.push_back(Json{{"id", r.id},
                       {"expression", r.expression},
                       {"weight", r.weight ? Json(*r.weight) : Json(nullptr)}});
  }
  return arr;
}

}  // namespace internal

std::vector<RuleRecord> ParseRuleFile(std::string_view json_text) {
  Json j = internal::ParseJson(json_text, "rule file");
  return internal::RuleRecordsFromJson(internal::Field(j, "rules"));
}

std::string SerializeRuleFile(std::span<const RuleRecord> rules) {
  return internal::DumpFile(Json{{"rules", internal::RuleRecordsToJson(rules)}});
}

RuleSet ResolveRuleSet(std::span<const RuleRecord> rules,
                       const PredicateCatalog &catalog) {
  RuleSet set;
  for (const auto &r : rules) {
    LinguisticExpression e = ParseExpression(r.expression, catalog);
    e.set_id(r.id);
    set.Add(std::move(e));
  }
  return set;
}

}  // namespace rulewise
