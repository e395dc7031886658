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

#ifndef RULEWISE_RULE_ENGINE_H_
#define RULEWISE_RULE_ENGINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rulewise/match_set.h"
#include "rulewise/predicate.h"

namespace rulewise {

class Workspace;

using ExpressionId = int64_t;
inline constexpr ExpressionId kNoExpressionId = -1;

// The only connective of the expression language.
inline constexpr std::string_view kAndConnective = " AND ";

// A positive conjunction of predicates. The body is kept sorted ascending;
// equality and hashing look at the body only, never the id.
class LinguisticExpression {
 public:
  // Throws kInvalidArgument when empty or when an id repeats.
  explicit LinguisticExpression(std::vector<int> predicate_ids,
                                ExpressionId id = kNoExpressionId);

  ExpressionId id() const { return id_; }
  void set_id(ExpressionId id) { id_ = id; }

  const std::vector<int> &predicate_ids() const { return predicate_ids_; }
  size_t size() const { return predicate_ids_.size(); }
  bool Contains(int predicate_id) const;

  bool operator==(const LinguisticExpression &other) const {
    return predicate_ids_ == other.predicate_ids_;
  }

 private:
  std::vector<int> predicate_ids_;
  ExpressionId id_;
};

struct WeightedRule {
  LinguisticExpression expression;
  std::optional<double> weight;  // nullopt for human-edited rules
};

// Disjunction of expressions. Order is kept for display only.
class RuleSet {
 public:
  RuleSet() = default;

  // Throws kAlreadyExists if an equal body is already present.
  void Add(LinguisticExpression expression);
  // Id of the member with an equal body, if any.
  std::optional<ExpressionId> FindBody(const LinguisticExpression &e) const;
  bool Contains(const LinguisticExpression &e) const {
    return FindBody(e).has_value();
  }

  const std::vector<LinguisticExpression> &expressions() const {
    return expressions_;
  }
  size_t size() const { return expressions_.size(); }
  bool empty() const { return expressions_.empty(); }

 private:
  std::vector<LinguisticExpression> expressions_;
};

struct Metrics {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  // Ratios with the zero-denominator convention: 0 when undefined.
  static Metrics FromCounts(int tp, int fp, int fn);

  bool operator==(const Metrics &) const = default;
};

enum class MetricKey { kPrecision, kRecall, kF1 };

double MetricValue(const Metrics &metrics, MetricKey key);
const char *MetricKeyName(MetricKey key);
// "precision" | "recall" | "f1"; throws kInvalidArgument otherwise.
MetricKey ParseMetricKey(std::string_view name);

// ---- Expression language -------------------------------------------------

// expr := pred (" AND " pred)*. Throws kInvalidArgument on empty input, a
// malformed or duplicate predicate, and kNotFound on a name that is not in
// the catalog.
LinguisticExpression ParseExpression(std::string_view text,
                                     const PredicateCatalog &catalog);

// The predicates of an expression, without resolving them.
std::vector<PredicateKey> ParseExpressionKeys(std::string_view text);

// Canonical text. Throws kNotFound on an id outside the catalog.
std::string RenderExpression(const LinguisticExpression &expression,
                             const PredicateCatalog &catalog);

// ---- Evaluation ----------------------------------------------------------

MatchSet EvalExpression(const LinguisticExpression &expression,
                        const MatchIndex &index);
MatchSet EvalRuleSet(std::span<const LinguisticExpression> expressions,
                     const MatchIndex &index);
inline MatchSet EvalRuleSet(const RuleSet &rules, const MatchIndex &index) {
  return EvalRuleSet(rules.expressions(), index);
}

Metrics ComputeMetrics(const MatchSet &matches, const MatchIndex &index);

// ---- Ranking and filtering -----------------------------------------------

struct ScoredRule {
  LinguisticExpression expression;
  Metrics metrics;
};

std::vector<ScoredRule> ScoreRules(
    std::span<const LinguisticExpression> expressions, const MatchIndex &index);

// Descending by key; ties go to the shorter expression, then the lower id.
std::vector<ScoredRule> RankRules(std::vector<ScoredRule> rules, MetricKey key);

struct RuleFilter {
  std::map<MetricKey, double> min_metric;
  std::set<int> required_predicates;
  std::set<int> excluded_predicates;
};

std::vector<ScoredRule> FilterRules(std::vector<ScoredRule> rules,
                                    const RuleFilter &filter);

// ---- Look-ahead ----------------------------------------------------------

struct DeltaReport {
  Metrics base_metrics;
  Metrics combined_metrics;
  int delta_tp = 0;
  int delta_fp = 0;
  std::vector<int> new_match_ids;
};

// Throws kAlreadyExists if the candidate body is already approved.
DeltaReport ComputeDelta(const RuleSet &approved,
                         const LinguisticExpression &candidate,
                         const MatchIndex &index);
// Same, given the approved set's matches.
DeltaReport ComputeDelta(const MatchSet &approved_matches,
                         const LinguisticExpression &candidate,
                         const MatchIndex &index);

// ---- Editing -------------------------------------------------------------

// Both return an expression without an id. Drop throws kInvalidArgument on
// the last predicate and kNotFound on an absent one; Add throws
// kAlreadyExists on a predicate that is already present.
LinguisticExpression DropPredicate(const LinguisticExpression &expression,
                                   int predicate_id);
LinguisticExpression AddPredicate(const LinguisticExpression &expression,
                                  int predicate_id);

struct DiffExample {
  int sentence_id = 0;
  bool gained = false;  // matched by `after` but not by `before`

  bool operator==(const DiffExample &) const = default;
};

// Up to k sentences of the symmetric difference, sampled with `seed` when
// there are more than k, returned in id order.
std::vector<DiffExample> DiffExamples(const LinguisticExpression &before,
                                      const LinguisticExpression &after,
                                      const MatchIndex &index, size_t k,
                                      uint64_t seed);

// ---- Examples ------------------------------------------------------------

inline constexpr size_t kExamplesPerClass = 4;

struct ExampleSentence {
  int sentence_id = 0;
  std::vector<Highlight> highlights;

  bool operator==(const ExampleSentence &) const = default;
};

struct ExampleSample {
  std::vector<ExampleSentence> true_positives;
  std::vector<ExampleSentence> false_positives;
  uint64_t seed = 0;

  bool operator==(const ExampleSample &) const = default;
};

// Uniform sample without replacement of up to kExamplesPerClass true and
// false positive matches, with the sites that satisfied each predicate.
ExampleSample SampleExamples(const LinguisticExpression &expression,
                             const Workspace &workspace, uint64_t seed);

// ---- Rule-set files ------------------------------------------------------

struct RuleRecord {
  ExpressionId id = 0;
  std::string expression;
  std::optional<double> weight;

  bool operator==(const RuleRecord &) const = default;
};

// {"rules": [{"id": int, "expression": str, "weight": float|null}]}
std::vector<RuleRecord> ParseRuleFile(std::string_view json_text);
std::string SerializeRuleFile(std::span<const RuleRecord> rules);

// Resolve records against a catalog, assigning each expression its id.
// Throws kAlreadyExists on a repeated body.
RuleSet ResolveRuleSet(std::span<const RuleRecord> rules,
                       const PredicateCatalog &catalog);

}  // namespace rulewise

#endif  // RULEWISE_RULE_ENGINE_H_
