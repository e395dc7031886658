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

#ifndef RULEWISE_LEARNER_H_
#define RULEWISE_LEARNER_H_

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rulewise/match_set.h"
#include "rulewise/predicate.h"
#include "rulewise/rule_engine.h"

namespace rulewise {

struct LearnerConfig {
  int max_depth = 3;
  int beam_width = 50;
  int min_support = 5;
  // Expressions with two or more predicates are emitted as candidates only
  // when their training precision reaches this value. Singletons are always
  // emitted.
  double min_precision_seed = 0.5;
  int epochs = 200;
  double learning_rate = 0.1;
  double l1_penalty = 0.01;
  uint64_t rng_seed = 0;

  // Throws kInvalidArgument when an invariant does not hold.
  void Validate() const;

  bool operator==(const LearnerConfig &) const = default;
};

// Missing keys keep their defaults; unknown keys are rejected.
LearnerConfig ParseLearnerConfig(std::string_view json_text);
std::string SerializeLearnerConfig(const LearnerConfig &config);

struct WeightedRuleModel {
  std::vector<WeightedRule> rules;
  double bias = 0.0;
  LearnerConfig config;
  // Loss at the starting point, then after each epoch (epochs + 1 values).
  std::vector<double> loss_history;
};

inline double Sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z))
                : std::exp(z) / (1.0 + std::exp(z));
}

// Beam search over conjunctions of depth 1..max_depth. Output order: all
// support-qualified singletons by predicate id, then each deeper level's
// beam by descending F1.
std::vector<LinguisticExpression> GenerateCandidates(
    const MatchIndex &index, const LearnerConfig &config);

// Mean binary cross-entropy of sigmoid(bias + sum of matched weights) plus
// l1_penalty * sum(weights), for a fixed set of rule match sets.
class WeightObjective {
 public:
  WeightObjective(std::span<const MatchSet> rule_matches, const MatchSet &labels,
                  double l1_penalty);

  size_t num_rules() const { return rule_sentences_.size(); }
  size_t num_sentences() const { return labels_.size(); }

  // Logits per sentence.
  std::vector<double> Logits(std::span<const double> weights,
                             double bias) const;
  double Loss(std::span<const double> weights, double bias) const;
  // Writes d loss / d weight into weight_gradient and returns d loss / d bias.
  // The penalty term is differentiated as l1_penalty (weights are >= 0).
  double Gradient(std::span<const double> weights, double bias,
                  std::span<double> weight_gradient) const;

 private:
  std::vector<std::vector<int>> rule_sentences_;
  std::vector<uint8_t> labels_;
  double l1_penalty_;
};

// Called after every accepted epoch.
using EpochObserver = std::function<void(
    int epoch, std::span<const double> weights, double bias, double loss)>;

// Projected full-batch gradient descent. An epoch that would raise the loss
// is retried with half the step size. Rules whose final weight is below
// kPruneWeight are dropped; surviving rules keep their candidate index as id.
// Throws kInvalidArgument on an empty candidate list.
inline constexpr double kPruneWeight = 1e-6;
WeightedRuleModel TrainWeights(std::span<const LinguisticExpression> candidates,
                               const MatchIndex &index,
                               const LearnerConfig &config,
                               const EpochObserver &observer = {});

// sigmoid(bias + sum of weights of the matched rules), per sentence.
std::vector<double> PredictScores(const WeightedRuleModel &model,
                                  const MatchIndex &index);

struct SelectionStep {
  ExpressionId id = 0;
  double f1_gain = 0.0;
  double f1 = 0.0;  // of the prefix ending at this step
};

struct SelectionResult {
  RuleSet chosen;
  int k = 0;
  Metrics train_metrics;
  // The full greedy path; the first k steps are the chosen prefix.
  std::vector<SelectionStep> selection_trace;
};

// Greedy forward selection by disjunctive training F1. Only rules that add at
// least one new match are eligible at each step. Ties go to the higher
// weight, then the shorter rule, then the lower id. Every prefix up to k_max
// is scored; the best one (smallest on ties) is returned. Throws
// kInvalidArgument on k_max < 1 or an empty model.
SelectionResult TopKSelect(const WeightedRuleModel &model,
                           const MatchIndex &index, int k_max);

// On-disk form: the rule file plus bias, config and loss history.
struct ModelFile {
  std::vector<RuleRecord> rules;
  double bias = 0.0;
  LearnerConfig config;
  std::vector<double> loss_history;

  bool operator==(const ModelFile &) const = default;
};

ModelFile ParseModelFile(std::string_view json_text);
std::string SerializeModelFile(const ModelFile &file);

ModelFile ToModelFile(const WeightedRuleModel &model,
                      const PredicateCatalog &catalog);
WeightedRuleModel ResolveModel(const ModelFile &file,
                               const PredicateCatalog &catalog);

// Every predicate the file's rules mention.
std::vector<PredicateKey> ReferencedPredicates(
    std::span<const RuleRecord> rules);

}  // namespace rulewise

#endif  // RULEWISE_LEARNER_H_
