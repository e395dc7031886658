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

#include "rulewise/learner.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "json_util.h"
#include "rulewise/error.h"

namespace rulewise {

using internal::Json;

void LearnerConfig::Validate() const {
  auto require = [](bool ok, const char *what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  require(max_depth >= 1, "max_depth must be >= 1");
  require(beam_width >= 1, "beam_width must be >= 1");
  require(epochs >= 1, "epochs must be >= 1");
  require(learning_rate > 0, "learning_rate must be > 0");
  require(l1_penalty >= 0, "l1_penalty must be >= 0");
  require(min_precision_seed >= 0 && min_precision_seed <= 1,
          "min_precision_seed must be in [0, 1]");
}

namespace {

Json ConfigToJson(const LearnerConfig &c) {
  return Json{{"max_depth", c.max_depth},
              {"beam_width", c.beam_width},
              {"min_support", c.min_support},
              {"min_precision_seed", c.min_precision_seed},
              {"epochs", c.epochs},
              {"learning_rate", c.learning_rate},
              {"l1_penalty", c.l1_penalty},
              {"rng_seed", c.rng_seed}};
}

LearnerConfig ConfigFromJson(const Json &j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "learner config must be an object");
  }
  internal::CheckKeys(j,
                      {"max_depth", "beam_width", "min_support",
                       "min_precision_seed", "epochs", "learning_rate",
                       "l1_penalty", "rng_seed"},
                      "learner config");
  LearnerConfig c;
  auto get_int = [&](const char *key, int &out) {
    if (j.contains(key)) out = static_cast<int>(internal::GetInt(j, key));
  };
  auto get_num = [&](const char *key, double &out) {
    if (j.contains(key)) out = internal::GetNumber(j, key);
  };
  get_int("max_depth", c.max_depth);
  get_int("beam_width", c.beam_width);
  get_int("min_support", c.min_support);
  get_num("min_precision_seed", c.min_precision_seed);
  get_int("epochs", c.epochs);
  get_num("learning_rate", c.learning_rate);
  get_num("l1_penalty", c.l1_penalty);
  if (j.contains("rng_seed")) {
    const Json &seed = j.at("rng_seed");
    if (!seed.is_number_unsigned()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "rng_seed must be a non-negative integer");
    }
    c.rng_seed = seed.get<uint64_t>();
  }
  c.Validate();
  return c;
}

}  // namespace

LearnerConfig ParseLearnerConfig(std::string_view json_text) {
  return ConfigFromJson(internal::ParseJson(json_text, "learner config"));
}

std::string SerializeLearnerConfig(const LearnerConfig &config) {
  return internal::DumpFile(ConfigToJson(config));
}

// ---- Candidate generation ------------------------------------------------

namespace {

struct Node {
  std::vector<int> body;  // sorted
  MatchSet matches;
  int64_t matched = 0;
  int64_t tp = 0;
  double f1 = 0.0;
};

Node MakeNode(std::vector<int> body, MatchSet matches, const MatchIndex &index) {
  Node node{std::move(body), std::move(matches), 0, 0, 0.0};
  node.matched = static_cast<int64_t>(node.matches.Count());
  node.tp = static_cast<int64_t>(node.matches.IntersectCount(index.labels()));
  node.f1 = Metrics::FromCounts(static_cast<int>(node.tp),
                                static_cast<int>(node.matched - node.tp),
                                static_cast<int>(index.positives() - node.tp))
                .f1;
  return node;
}

// Best F1 first; equal F1 falls back to the lexicographically smaller body.
void KeepBeam(std::vector<Node> &nodes, int beam_width) {
  std::sort(nodes.begin(), nodes.end(), [](const Node &a, const Node &b) {
    if (a.f1 != b.f1) return a.f1 > b.f1;
    return a.body < b.body;
  });
  if (nodes.size() > static_cast<size_t>(beam_width)) nodes.resize(beam_width);
}

}  // namespace

std::vector<LinguisticExpression> GenerateCandidates(
    const MatchIndex &index, const LearnerConfig &config) {
  config.Validate();
  std::vector<int> pool;
  std::vector<Node> level;
  for (size_t p = 0; p < index.num_predicates(); ++p) {
    if (static_cast<int>(index.matches(p).Count()) < config.min_support) continue;
    pool.push_back(static_cast<int>(p));
    level.push_back(MakeNode({static_cast<int>(p)}, index.matches(p), index));
  }

  std::vector<LinguisticExpression> out;
  for (const Node &n : level) out.emplace_back(n.body);

  std::set<std::vector<int>> seen;
  for (const Node &n : level) seen.insert(n.body);
  KeepBeam(level, config.beam_width);

  for (int depth = 2; depth <= config.max_depth && !level.empty(); ++depth) {
    std::vector<Node> children;
    for (const Node &parent : level) {
      for (int p : pool) {
        if (std::binary_search(parent.body.begin(), parent.body.end(), p)) {
          continue;
        }
        std::vector<int> body = parent.body;
        body.insert(std::upper_bound(body.begin(), body.end(), p), p);
        if (seen.count(body) != 0) continue;
        MatchSet matches = parent.matches & index.matches(p);
        const int64_t matched = static_cast<int64_t>(matches.Count());
        if (matched < config.min_support) continue;
        const int64_t tp =
            static_cast<int64_t>(matches.IntersectCount(index.labels()));
        // tp/matched > parent.tp/parent.matched, in integers.
        if (tp * parent.matched <= parent.tp * matched) continue;
        seen.insert(body);
        children.push_back(MakeNode(std::move(body), std::move(matches), index));
      }
    }
    // Every qualifying child precise enough is emitted, best F1 first; only
    // the top beam_width are extended further.
    KeepBeam(children, static_cast<int>(children.size()));
    for (const Node &n : children) {
      const double precision =
          static_cast<double>(n.tp) / static_cast<double>(n.matched);
      if (precision >= config.min_precision_seed) out.emplace_back(n.body);
    }
    KeepBeam(children, config.beam_width);
    level = std::move(children);
  }
  return out;
}

// ---- Weight fitting ------------------------------------------------------

WeightObjective::WeightObjective(std::span<const MatchSet> rule_matches,
                                 const MatchSet &labels, double l1_penalty)
    : labels_(labels.size()), l1_penalty_(l1_penalty) {
  for (const auto &m : rule_matches) rule_sentences_.push_back(m.ToIds());
  labels.ForEach([&](size_t i) { labels_[i] = 1; });
}

std::vector<double> WeightObjective::Logits(std::span<const double> weights,
                                            double bias) const {
  std::vector<double> z(labels_.size(), bias);
  for (size_t r = 0; r < rule_sentences_.size(); ++r) {
    for (int s : rule_sentences_[r]) z[s] += weights[r];
  }
  return z;
}

double WeightObjective::Loss(std::span<const double> weights, double bias) const {
  const std::vector<double> z = Logits(weights, bias);
  double total = 0.0;
  for (size_t i = 0; i < z.size(); ++i) {
    // log(1 + e^z) - y z, evaluated without overflow.
    const double softplus =
        z[i] > 0 ? z[i] + std::log1p(std::exp(-z[i])) : std::log1p(std::exp(z[i]));
    total += softplus - (labels_[i] ? z[i] : 0.0);
  }
  double loss = z.empty() ? 0.0 : total / static_cast<double>(z.size());
  for (double w : weights) loss += l1_penalty_ * w;
  return loss;
}

double WeightObjective::Gradient(std::span<const double> weights, double bias,
                                 std::span<double> weight_gradient) const {
  const std::vector<double> z = Logits(weights, bias);
  const double inv_n = z.empty() ? 0.0 : 1.0 / static_cast<double>(z.size());
  std::vector<double> residual(z.size());
  double bias_gradient = 0.0;
  for (size_t i = 0; i < z.size(); ++i) {
    residual[i] = Sigmoid(z[i]) - labels_[i];
    bias_gradient += residual[i];
  }
  for (size_t r = 0; r < rule_sentences_.size(); ++r) {
    double g = 0.0;
    for (int s : rule_sentences_[r]) g += residual[s];
    weight_gradient[r] = g * inv_n + l1_penalty_;
  }
  return bias_gradient * inv_n;
}

WeightedRuleModel TrainWeights(std::span<const LinguisticExpression> candidates,
                               const MatchIndex &index,
                               const LearnerConfig &config,
                               const EpochObserver &observer) {
  config.Validate();
  if (candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no candidates to train");
  }
  std::vector<MatchSet> matches;
  matches.reserve(candidates.size());
  for (const auto &c : candidates) matches.push_back(EvalExpression(c, index));
  const WeightObjective objective(matches, index.labels(), config.l1_penalty);

  const size_t n = index.corpus_size();
  std::vector<double> weights(candidates.size(), 0.0);
  double bias = 0.0;
  if (n > 0) {
    double rate = static_cast<double>(index.positives()) / static_cast<double>(n);
    rate = std::clamp(rate, 1e-3, 1.0 - 1e-3);
    bias = std::log(rate / (1.0 - rate));
  }

  WeightedRuleModel model;
  model.config = config;
  double lr = config.learning_rate;
  double loss = objective.Loss(weights, bias);
  model.loss_history.reserve(config.epochs + 1);
  model.loss_history.push_back(loss);
  std::vector<double> gradient(weights.size());
  std::vector<double> trial(weights.size());
  constexpr int kMaxHalvings = 60;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double bias_gradient = objective.Gradient(weights, bias, gradient);
    for (int attempt = 0; attempt < kMaxHalvings; ++attempt) {
      for (size_t r = 0; r < weights.size(); ++r) {
        trial[r] = std::max(0.0, weights[r] - lr * gradient[r]);
      }
      const double trial_bias = bias - lr * bias_gradient;
      const double trial_loss = objective.Loss(trial, trial_bias);
      if (trial_loss <= loss) {
        weights.swap(trial);
        bias = trial_bias;
        loss = trial_loss;
        break;
      }
      lr *= 0.5;
    }
    model.loss_history.push_back(loss);
    if (observer) observer(epoch, weights, bias, loss);
  }

  model.bias = bias;
  for (size_t r = 0; r < candidates.size(); ++r) {
    if (weights[r] < kPruneWeight) continue;
    LinguisticExpression e = candidates[r];
    e.set_id(static_cast<ExpressionId>(r));
    model.rules.push_back({std::move(e), weights[r]});
  }
  return model;
}

std::vector<double> PredictScores(const WeightedRuleModel &model,
                                  const MatchIndex &index) {
  std::vector<double> z(index.corpus_size(), model.bias);
  for (const auto &rule : model.rules) {
    const double w = rule.weight.value_or(0.0);
    EvalExpression(rule.expression, index).ForEach([&](size_t s) { z[s] += w; });
  }
  for (double &v : z) v = Sigmoid(v);
  return z;
}

// ---- Top-K selection -----------------------------------------------------

SelectionResult TopKSelect(const WeightedRuleModel &model,
                           const MatchIndex &index, int k_max) {
  if (k_max < 1) throw Error(ErrorCode::kInvalidArgument, "k_max must be >= 1");
  if (model.rules.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "model has no rules");
  }
  const auto &rules = model.rules;
  std::vector<MatchSet> matches;
  for (const auto &r : rules) matches.push_back(EvalExpression(r.expression, index));

  // True when rule a should be preferred over rule b at equal F1.
  auto prefer = [&](size_t a, size_t b) {
    const double wa = rules[a].weight.value_or(0.0);
    const double wb = rules[b].weight.value_or(0.0);
    if (wa != wb) return wa > wb;
    if (rules[a].expression.size() != rules[b].expression.size()) {
      return rules[a].expression.size() < rules[b].expression.size();
    }
    return rules[a].expression.id() < rules[b].expression.id();
  };

  SelectionResult result;
  std::vector<bool> used(rules.size(), false);
  std::vector<size_t> order;
  MatchSet covered(index.corpus_size());
  double current_f1 = 0.0;
  double best_f1 = -1.0;
  for (int step = 1; step <= k_max; ++step) {
    std::optional<size_t> best;
    double best_step_f1 = 0.0;
    for (size_t r = 0; r < rules.size(); ++r) {
      if (used[r] || matches[r].IsSubsetOf(covered)) continue;
      const double f1 = ComputeMetrics(covered | matches[r], index).f1;
      if (!best || f1 > best_step_f1 || (f1 == best_step_f1 && prefer(r, *best))) {
        best = r;
        best_step_f1 = f1;
      }
    }
    if (!best) break;
    used[*best] = true;
    order.push_back(*best);
    covered |= matches[*best];
    result.selection_trace.push_back(
        {rules[*best].expression.id(), best_step_f1 - current_f1, best_step_f1});
    current_f1 = best_step_f1;
    if (best_step_f1 > best_f1) {
      best_f1 = best_step_f1;
      result.k = step;
    }
  }

  MatchSet chosen_matches(index.corpus_size());
  for (int i = 0; i < result.k; ++i) {
    result.chosen.Add(rules[order[i]].expression);
    chosen_matches |= matches[order[i]];
  }
  result.train_metrics = ComputeMetrics(chosen_matches, index);
  return result;
}

// ---- Model files ---------------------------------------------------------

ModelFile ParseModelFile(std::string_view json_text) {
  Json j = internal::ParseJson(json_text, "model file");
  internal::CheckKeys(j, {"rules", "bias", "config", "loss_history"}, "model file");
  ModelFile file;
  file.rules = internal::RuleRecordsFromJson(internal::Field(j, "rules"));
  file.bias = internal::GetNumber(j, "bias");
  file.config = ConfigFromJson(internal::Field(j, "config"));
  const Json &history = internal::Field(j, "loss_history");
  if (!history.is_array()) {
    throw Error(ErrorCode::kInvalidArgument, "loss_history must be an array");
  }
  for (const Json &v : history) {
    if (!v.is_number()) {
      throw Error(ErrorCode::kInvalidArgument, "loss_history must hold numbers");
    }
    file.loss_history.push_back(v.get<double>());
  }
  return file;
}

std::string SerializeModelFile(const ModelFile &file) {
  Json j{{"rules", internal::RuleRecordsToJson(file.rules)},
         {"bias", file.bias},
         {"config", ConfigToJson(file.config)},
         {"loss_history", file.loss_history}};
  return internal::DumpFile(j);
}

ModelFile ToModelFile(const WeightedRuleModel &model,
                      const PredicateCatalog &catalog) {
  ModelFile file;
  for (const auto &rule : model.rules) {
    file.rules.push_back({rule.expression.id(),
                          RenderExpression(rule.expression, catalog),
                          rule.weight});
  }
  file.bias = model.bias;
  file.config = model.config;
  file.loss_history = model.loss_history;
  return file;
}

WeightedRuleModel ResolveModel(const ModelFile &file,
                               const PredicateCatalog &catalog) {
  WeightedRuleModel model;
  RuleSet seen;
  std::set<ExpressionId> ids;
  for (const auto &record : file.rules) {
    if (!ids.insert(record.id).second) {
      throw Error(ErrorCode::kAlreadyExists,
                  "duplicate rule id " + std::to_string(record.id));
    }
    if (!record.weight) {
      throw Error(ErrorCode::kInvalidArgument,
                  "model rule " + std::to_string(record.id) + " has no weight");
    }
    if (*record.weight < 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "model rule " + std::to_string(record.id) +
                      " has a negative weight");
    }
    LinguisticExpression e = ParseExpression(record.expression, catalog);
    e.set_id(record.id);
    seen.Add(e);
    model.rules.push_back({std::move(e), record.weight});
  }
  model.bias = file.bias;
  model.config = file.config;
  model.loss_history = file.loss_history;
  return model;
}

std::vector<PredicateKey> ReferencedPredicates(std::span<const RuleRecord> rules) {
  std::vector<PredicateKey> keys;
  std::set<PredicateKey> seen;
  for (const auto &r : rules) {
    for (auto &key : ParseExpressionKeys(r.expression)) {
      if (seen.insert(key).second) keys.push_back(std::move(key));
    }
  }
  return keys;
}

}  // namespace rulewise
