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

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "rulewise/error.h"
#include "rulewise/rng.h"
#include "rulewise/synthgen.h"
#include "test_util.h"

namespace rulewise {
namespace {

TEST(ObjectiveTest, GradientMatchesCentralDifferences) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    testing::GradientFixture f = testing::RandomGradientFixture(seed);
    WeightObjective obj(f.rules, f.labels, 0.01);
    Rng rng(seed + 100);
    std::vector<double> w(5);
    for (double &x : w) x = 0.1 + rng.Uniform();  // away from the w = 0 kink
    const double bias = rng.Uniform() - 0.5;
    std::vector<double> g(5);
    const double gb = obj.Gradient(w, bias, g);
    const double h = 1e-5;
    for (size_t r = 0; r < w.size(); ++r) {
      std::vector<double> wp = w, wm = w;
      wp[r] += h;
      wm[r] -= h;
      const double numeric = (obj.Loss(wp, bias) - obj.Loss(wm, bias)) / (2 * h);
      EXPECT_LT(testing::RelErr(g[r], numeric), 1e-4) << "seed " << seed << " rule " << r;
    }
    const double numeric_b = (obj.Loss(w, bias + h) - obj.Loss(w, bias - h)) / (2 * h);
    EXPECT_LT(testing::RelErr(gb, numeric_b), 1e-4);
  }
}

TEST(ObjectiveTest, LossMatchesDirectFormula) {
  testing::GradientFixture f = testing::RandomGradientFixture(3);
  WeightObjective obj(f.rules, f.labels, 0.05);
  std::vector<double> w = {0.2, 0.0, 1.5, 0.3, 0.7};
  const double bias = -0.4;
  double total = 0;
  for (int s = 0; s < 20; ++s) {
    double z = bias;
    for (int r = 0; r < 5; ++r) z += f.rules[r].Test(s) ? w[r] : 0.0;
    const double p = 1.0 / (1.0 + std::exp(-z));
    total += f.labels.Test(s) ? -std::log(p) : -std::log(1 - p);
  }
  const double expected = total / 20 + 0.05 * (0.2 + 1.5 + 0.3 + 0.7);
  EXPECT_NEAR(obj.Loss(w, bias), expected, 1e-12);
}

TEST(SigmoidTest, StableAtExtremes) {
  EXPECT_DOUBLE_EQ(Sigmoid(0), 0.5);
  EXPECT_NEAR(Sigmoid(800), 1.0, 1e-15);
  EXPECT_NEAR(Sigmoid(-800), 0.0, 1e-15);
  EXPECT_NEAR(Sigmoid(1.0) + Sigmoid(-1.0), 1.0, 1e-15);
}

// Hand-computed 2-rule model over a 4-sentence index.
TEST(PredictTest, TwoRuleToyModel) {
  MatchSet p0(4), p1(4), labels(4);
  p0.Set(0);
  p0.Set(1);
  p1.Set(1);
  p1.Set(2);
  MatchIndex index({p0, p1}, labels);
  WeightedRuleModel model;
  model.bias = -1.0;
  model.rules.push_back({LinguisticExpression({0}, 0), 2.0});
  model.rules.push_back({LinguisticExpression({1}, 1), 0.5});
  const auto scores = PredictScores(model, index);
  ASSERT_EQ(scores.size(), 4u);
  EXPECT_NEAR(scores[0], 1 / (1 + std::exp(-1.0)), 1e-15);   // -1 + 2
  EXPECT_NEAR(scores[1], 1 / (1 + std::exp(-1.5)), 1e-15);   // -1 + 2 + 0.5
  EXPECT_NEAR(scores[2], 1 / (1 + std::exp(0.5)), 1e-15);    // -1 + 0.5
  EXPECT_NEAR(scores[3], 1 / (1 + std::exp(1.0)), 1e-15);    // bias only
}

class SynthLearnerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    data_ = GenerateSynthetic(testing::SmallSynthConfig(17, 600));
    ws_ = testing::SynthWorkspace(data_);
  }
  SynthData data_;
  std::shared_ptr<const Workspace> ws_;
};

TEST_F(SynthLearnerTest, CandidatesRespectGrowthRules) {
  LearnerConfig config;
  const auto candidates = GenerateCandidates(ws_->index(), config);
  const MatchIndex &index = ws_->index();
  std::set<std::vector<int>> bodies;
  size_t singletons = 0;
  for (const auto &c : candidates) {
    ASSERT_TRUE(bodies.insert(c.predicate_ids()).second) << "duplicate candidate";
    ASSERT_LE(c.size(), static_cast<size_t>(config.max_depth));
    const MatchSet m = EvalExpression(c, index);
    ASSERT_GE(static_cast<int>(m.Count()), config.min_support);
    if (c.size() == 1) {
      ++singletons;
      continue;
    }
    const Metrics mc = ComputeMetrics(m, index);
    EXPECT_GE(mc.precision, config.min_precision_seed);
    // Some one-smaller parent has strictly lower precision.
    bool has_parent = false;
    for (int p : c.predicate_ids()) {
      const Metrics mp = ComputeMetrics(EvalExpression(DropPredicate(c, p), index), index);
      has_parent |= mp.precision < mc.precision;
    }
    EXPECT_TRUE(has_parent);
  }
  size_t supported = 0;
  for (size_t p = 0; p < index.num_predicates(); ++p) {
    supported += static_cast<int>(index.matches(p).Count()) >= config.min_support;
  }
  EXPECT_EQ(singletons, supported);
  EXPECT_EQ(GenerateCandidates(index, config).size(), candidates.size());
}

TEST_F(SynthLearnerTest, TrainingInvariants) {
  LearnerConfig config;
  config.epochs = 150;
  config.learning_rate = 0.5;
  const auto candidates = GenerateCandidates(ws_->index(), config);
  int epochs_seen = 0;
  bool nonnegative = true;
  WeightedRuleModel model = TrainWeights(
      candidates, ws_->index(), config,
      [&](int, std::span<const double> w, double, double) {
        ++epochs_seen;
        for (double x : w) nonnegative &= x >= 0.0;
      });
  EXPECT_EQ(epochs_seen, config.epochs);
  EXPECT_TRUE(nonnegative);
  ASSERT_EQ(model.loss_history.size(), static_cast<size_t>(config.epochs + 1));
  for (size_t i = 1; i < model.loss_history.size(); ++i) {
    EXPECT_LE(model.loss_history[i], model.loss_history[i - 1]);
  }
  EXPECT_LT(model.loss_history.back(), model.loss_history.front());
  for (const auto &r : model.rules) {
    ASSERT_TRUE(r.weight.has_value());
    EXPECT_GE(*r.weight, kPruneWeight);
    EXPECT_EQ(candidates.at(r.expression.id()), r.expression);
  }
}

TEST_F(SynthLearnerTest, LearningIsDeterministic) {
  LearnerConfig config;
  config.epochs = 50;
  auto run = [&] {
    auto c = GenerateCandidates(ws_->index(), config);
    return SerializeModelFile(ToModelFile(TrainWeights(c, ws_->index(), config), ws_->catalog()));
  };
  EXPECT_EQ(run(), run());
}

TEST_F(SynthLearnerTest, ModelFileRoundTrip) {
  LearnerConfig config;
  config.epochs = 30;
  auto c = GenerateCandidates(ws_->index(), config);
  WeightedRuleModel model = TrainWeights(c, ws_->index(), config);
  const ModelFile file = ToModelFile(model, ws_->catalog());
  const std::string text = SerializeModelFile(file);
  const ModelFile parsed = ParseModelFile(text);
  EXPECT_EQ(parsed, file);
  EXPECT_EQ(SerializeModelFile(parsed), text);
  WeightedRuleModel back = ResolveModel(parsed, ws_->catalog());
  ASSERT_EQ(back.rules.size(), model.rules.size());
  for (size_t i = 0; i < back.rules.size(); ++i) {
    EXPECT_EQ(back.rules[i].expression, model.rules[i].expression);
    EXPECT_EQ(back.rules[i].expression.id(), model.rules[i].expression.id());
    EXPECT_EQ(back.rules[i].weight, model.rules[i].weight);
  }
  EXPECT_EQ(back.bias, model.bias);
}

TEST(ModelFileTest, ResolveRejectsBadModels) {
  PredicateCatalog catalog;
  catalog.Intern(PredicateKey::Property("tense", "past"));
  catalog.Intern(PredicateKey::Property("voice", "active"));
  ModelFile f;
  f.rules = {{0, "prop:tense=past", -0.1}};
  EXPECT_THROW(ResolveModel(f, catalog), Error);
  f.rules = {{0, "prop:tense=past", 0.1}, {0, "prop:voice=active", 0.1}};
  EXPECT_THROW(ResolveModel(f, catalog), Error);
  f.rules = {{0, "prop:tense=past", 0.1}, {1, "prop:tense=past", 0.1}};
  EXPECT_THROW(ResolveModel(f, catalog), Error);
  EXPECT_THROW(ParseModelFile(R"({"rules":[],"bias":0,"config":{},"loss_history":[],"x":1})"),
               Error);
}

TEST(LearnerConfigTest, ParseSerializeValidate) {
  LearnerConfig c;
  c.max_depth = 2;
  c.l1_penalty = 0.5;
  c.rng_seed = 99;
  EXPECT_EQ(ParseLearnerConfig(SerializeLearnerConfig(c)), c);
  EXPECT_EQ(ParseLearnerConfig("{}"), LearnerConfig{});
  EXPECT_THROW(ParseLearnerConfig(R"({"max_depth":0})"), Error);
  EXPECT_THROW(ParseLearnerConfig(R"({"learning_rate":0})"), Error);
  EXPECT_THROW(ParseLearnerConfig(R"({"epochs":0})"), Error);
  EXPECT_THROW(ParseLearnerConfig(R"({"beam_width":0})"), Error);
  EXPECT_THROW(ParseLearnerConfig(R"({"depth":3})"), Error);
}

WeightedRuleModel ModelOf(std::vector<std::pair<std::vector<int>, double>> rules) {
  WeightedRuleModel m;
  ExpressionId id = 0;
  for (auto &[body, w] : rules) m.rules.push_back({LinguisticExpression(body, id++), w});
  return m;
}

TEST(TopKTest, SingleRuleModel) {
  MatchSet p(4), labels(4);
  p.Set(0);
  labels.Set(0);
  MatchIndex index({p}, labels);
  SelectionResult r = TopKSelect(ModelOf({{{0}, 1.0}}), index, 8);
  EXPECT_EQ(r.k, 1);
  EXPECT_EQ(r.chosen.size(), 1u);
  EXPECT_EQ(r.train_metrics.f1, 1.0);
  EXPECT_THROW(TopKSelect(ModelOf({{{0}, 1.0}}), index, 0), Error);
  EXPECT_THROW(TopKSelect(WeightedRuleModel{}, index, 3), Error);
}

TEST(TopKTest, SubsumedRuleNeverPickedWhileGainRemains) {
  // p0 = {0,1}, p1 = {0}, p2 = {2}; all positive.
  MatchSet p0(4), p1(4), p2(4), labels(4);
  p0.Set(0);
  p0.Set(1);
  p1.Set(0);
  p2.Set(2);
  labels.Set(0);
  labels.Set(1);
  labels.Set(2);
  MatchIndex index({p0, p1, p2}, labels);
  // The subsumed rule carries the largest weight.
  SelectionResult r = TopKSelect(ModelOf({{{0}, 0.1}, {{1}, 9.0}, {{2}, 0.1}}), index, 3);
  ASSERT_EQ(r.selection_trace.size(), 2u);
  EXPECT_EQ(r.selection_trace[0].id, 0);
  EXPECT_EQ(r.selection_trace[1].id, 2);
  EXPECT_EQ(r.k, 2);
}

// Property: each greedy step's gain dominates every eligible alternative,
// and k is the first prefix with maximal F1.
TEST(TopKTest, GreedyDominanceExhaustive) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 30, m = 8;
    std::vector<MatchSet> preds;
    MatchSet labels(n);
    for (int s = 0; s < n; ++s) {
      if (rng.Bernoulli(0.4)) labels.Set(s);
    }
    std::vector<std::pair<std::vector<int>, double>> rules;
    for (int p = 0; p < m; ++p) {
      MatchSet x(n);
      for (int s = 0; s < n; ++s) {
        if (rng.Bernoulli(0.2)) x.Set(s);
      }
      preds.push_back(x);
      rules.push_back({{p}, 0.1 + rng.Uniform()});
    }
    MatchIndex index(preds, labels);
    WeightedRuleModel model = ModelOf(rules);
    SelectionResult r = TopKSelect(model, index, 5);
    MatchSet covered(n);
    std::set<ExpressionId> used;
    double prev = 0.0;
    double best = -1;
    int best_k = 0;
    for (size_t step = 0; step < r.selection_trace.size(); ++step) {
      const SelectionStep &s = r.selection_trace[step];
      for (const auto &rule : model.rules) {
        const ExpressionId id = rule.expression.id();
        if (used.count(id) || id == s.id) continue;
        const MatchSet &mm = preds[rule.expression.predicate_ids()[0]];
        if (mm.IsSubsetOf(covered)) continue;
        const double alt = ComputeMetrics(covered | mm, index).f1 - prev;
        EXPECT_GE(s.f1_gain, alt - 1e-15);
      }
      covered |= preds[model.rules[s.id].expression.predicate_ids()[0]];
      used.insert(s.id);
      const double f1 = ComputeMetrics(covered, index).f1;
      EXPECT_DOUBLE_EQ(s.f1, f1);
      EXPECT_NEAR(s.f1_gain, f1 - prev, 1e-15);
      prev = f1;
      if (f1 > best) {
        best = f1;
        best_k = static_cast<int>(step) + 1;
      }
    }
    EXPECT_EQ(r.k, best_k);
    EXPECT_DOUBLE_EQ(r.train_metrics.f1, best);
  }
}

}  // namespace
}  // namespace rulewise
