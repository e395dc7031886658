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

#include "rulewise/session.h"

#include <gtest/gtest.h>

#include "rulewise/error.h"
#include "rulewise/synthgen.h"
#include "test_util.h"

namespace rulewise {
namespace {

ErrorCode CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

Session::Clock FixedClock() {
  return [] { return std::string("2026-01-01T00:00:00Z"); };
}

class SessionTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new SynthData(GenerateSynthetic(testing::SmallSynthConfig(23, 500)));
    ws_ = new std::shared_ptr<const Workspace>(testing::SynthWorkspace(*data_));
    LearnerConfig config;
    config.epochs = 40;
    config.learning_rate = 0.5;
    auto candidates = GenerateCandidates((*ws_)->index(), config);
    model_ = new std::shared_ptr<const WeightedRuleModel>(
        std::make_shared<const WeightedRuleModel>(
            TrainWeights(candidates, (*ws_)->index(), config)));
  }
  static void TearDownTestSuite() {
    delete model_;
    delete ws_;
    delete data_;
  }

  Session NewSession(const std::string &id = "t") const {
    return Session(id, *ws_, *model_, FixedClock());
  }
  const MatchIndex &index() const { return (*ws_)->index(); }
  ExpressionId RuleId(size_t i) const { return (*model_)->rules.at(i).expression.id(); }

  Metrics Empty() const { return ComputeMetrics(MatchSet(index().corpus_size()), index()); }

  Metrics FromScratch(const Session &s) const {
    std::vector<LinguisticExpression> rules;
    for (ExpressionId id : s.approved()) rules.push_back(s.Resolve(id));
    return ComputeMetrics(EvalRuleSet(rules, index()), index());
  }

  static SynthData *data_;
  static std::shared_ptr<const Workspace> *ws_;
  static std::shared_ptr<const WeightedRuleModel> *model_;
};

SynthData *SessionTest::data_ = nullptr;
std::shared_ptr<const Workspace> *SessionTest::ws_ = nullptr;
std::shared_ptr<const WeightedRuleModel> *SessionTest::model_ = nullptr;

TEST_F(SessionTest, FreshSessionIsEmpty) {
  Session s = NewSession();
  EXPECT_EQ(s.combined_metrics(), Empty());
  EXPECT_TRUE(s.events().empty());
  EXPECT_TRUE(s.approved().empty());
  Session other = NewSession("u");
  s.Approve(RuleId(0));
  EXPECT_TRUE(other.approved().empty());
  EXPECT_EQ(other.combined_metrics(), Empty());
}

TEST_F(SessionTest, ApproveRecomputesCombinedMetrics) {
  Session s = NewSession();
  const Metrics single =
      ComputeMetrics(EvalExpression(s.Resolve(RuleId(0)), index()), index());
  EXPECT_EQ(s.Approve(RuleId(0)), single);
  EXPECT_DOUBLE_EQ(s.combined_metrics().recall, single.recall);
  s.Approve(RuleId(1));
  EXPECT_EQ(s.combined_metrics(), FromScratch(s));
  EXPECT_EQ(CodeOf([&] { s.Approve(RuleId(1)); }), ErrorCode::kAlreadyExists);
  EXPECT_EQ(CodeOf([&] { s.Approve(999999); }), ErrorCode::kNotFound);
  EXPECT_EQ(CodeOf([&] { s.Disapprove(999999); }), ErrorCode::kNotFound);
  EXPECT_EQ(s.events().size(), 2u);
}

TEST_F(SessionTest, MarksStayDisjoint) {
  Session s = NewSession();
  s.Disapprove(RuleId(0));
  EXPECT_EQ(s.mark(RuleId(0)), Mark::kDisapproved);
  EXPECT_EQ(s.combined_metrics(), Empty());
  s.Approve(RuleId(0));
  EXPECT_EQ(s.mark(RuleId(0)), Mark::kApproved);
  EXPECT_EQ(s.disapproved().count(RuleId(0)), 0u);
  s.Disapprove(RuleId(0));
  EXPECT_TRUE(s.approved().empty());
  EXPECT_EQ(s.combined_metrics(), Empty());
}

TEST_F(SessionTest, UnmarkOfUnmarkedIsRecordedNoOp) {
  Session s = NewSession();
  s.Unmark(RuleId(2));
  EXPECT_EQ(s.events().size(), 1u);
  EXPECT_EQ(s.events()[0].kind, EventKind::kUnmark);
  EXPECT_EQ(s.mark(RuleId(2)), Mark::kNone);
}

TEST_F(SessionTest, ApproveUnmarkApproveMatchesSingleApprove) {
  Session a = NewSession();
  a.Approve(RuleId(0));
  Session b = NewSession();
  b.Approve(RuleId(0));
  b.Unmark(RuleId(0));
  b.Approve(RuleId(0));
  EXPECT_EQ(a.combined_metrics(), b.combined_metrics());
  EXPECT_EQ(a.approved(), b.approved());
}

TEST_F(SessionTest, LookAheadMatchesApproval) {
  Session s = NewSession();
  s.Approve(RuleId(0));
  const DeltaReport d = s.LookAhead(RuleId(1));
  EXPECT_EQ(d.base_metrics, s.combined_metrics());
  s.Approve(RuleId(1));
  EXPECT_EQ(d.combined_metrics, s.combined_metrics());
  EXPECT_EQ(CodeOf([&] { s.LookAhead(RuleId(1)); }), ErrorCode::kAlreadyExists);
}

TEST_F(SessionTest, PlaygroundEditsFollowEngineLaws) {
  Session s = NewSession();
  // Pick a multi-predicate rule.
  ExpressionId id = kNoExpressionId;
  for (const auto &r : (*model_)->rules) {
    if (r.expression.size() >= 2) id = r.expression.id();
  }
  ASSERT_NE(id, kNoExpressionId);
  PlaygroundState st = s.OpenPlayground(id);
  EXPECT_TRUE(s.events().empty());
  EXPECT_EQ(st.metrics, ComputeMetrics(EvalExpression(st.working, index()), index()));
  EXPECT_EQ(st.base_delta.delta_tp, 0);

  const int dropped = st.working.predicate_ids()[0];
  PlaygroundState after =
      ApplyPlaygroundEdit(st, {PlaygroundEdit::Op::kDrop, dropped}, **ws_);
  EXPECT_GE(after.metrics.recall, st.metrics.recall);
  EXPECT_EQ(after.metrics, ComputeMetrics(EvalExpression(after.working, index()), index()));
  EXPECT_EQ(after.last_diff.lost, 0);
  EXPECT_EQ(after.last_diff.gained, after.metrics.tp + after.metrics.fp -
                                        st.metrics.tp - st.metrics.fp);
  EXPECT_LE(after.last_diff.examples.size(), kDiffExamples);

  PlaygroundState back =
      ApplyPlaygroundEdit(after, {PlaygroundEdit::Op::kAdd, dropped}, **ws_);
  EXPECT_EQ(back.working, st.working);
  EXPECT_EQ(back.metrics, st.metrics);
  EXPECT_LE(back.metrics.recall, after.metrics.recall);

  EXPECT_EQ(CodeOf([&] {
              ApplyPlaygroundEdit(back, {PlaygroundEdit::Op::kAdd, dropped}, **ws_);
            }),
            ErrorCode::kAlreadyExists);
  PlaygroundState single = back;
  while (single.working.size() > 1) {
    single = ApplyPlaygroundEdit(
        single, {PlaygroundEdit::Op::kDrop, single.working.predicate_ids()[0]}, **ws_);
  }
  EXPECT_EQ(CodeOf([&] {
              ApplyPlaygroundEdit(
                  single, {PlaygroundEdit::Op::kDrop, single.working.predicate_ids()[0]},
                  **ws_);
            }),
            ErrorCode::kInvalidArgument);
}

TEST_F(SessionTest, CommitCreatesFreshUnapprovedExpression) {
  Session s = NewSession();
  PlaygroundState st = s.OpenPlayground(RuleId(0));
  // Add some predicate not already in the rule.
  int extra = 0;
  while (st.working.Contains(extra)) ++extra;
  st = ApplyPlaygroundEdit(st, {PlaygroundEdit::Op::kAdd, extra}, **ws_);
  bool duplicate = false;
  for (const auto &e : s.AllExpressions()) duplicate |= e == st.working;
  if (duplicate) GTEST_SKIP() << "edited rule already in the model";
  const ExpressionId id = s.CommitPlayground(st);
  EXPECT_TRUE(s.IsCustom(id));
  EXPECT_EQ(s.mark(id), Mark::kNone);
  EXPECT_EQ(s.Resolve(id), st.working);
  ASSERT_EQ(s.events().size(), 1u);
  EXPECT_EQ(s.events()[0].kind, EventKind::kCreateCustom);
  EXPECT_EQ(s.events()[0].base_id, RuleId(0));
  ExpressionId max_model = 0;
  for (const auto &r : (*model_)->rules) max_model = std::max(max_model, r.expression.id());
  EXPECT_GT(id, max_model);

  s.Approve(id);
  EXPECT_EQ(s.combined_metrics(), FromScratch(s));

  // Editing a custom expression is an edit_custom event.
  PlaygroundState again = s.OpenPlayground(id);
  again = ApplyPlaygroundEdit(again, {PlaygroundEdit::Op::kDrop, extra}, **ws_);
  EXPECT_EQ(CodeOf([&] { s.CommitPlayground(again); }), ErrorCode::kAlreadyExists);
}

TEST_F(SessionTest, CommitDuplicateNamesExistingId) {
  Session s = NewSession();
  const ExpressionId target = RuleId(3);
  PlaygroundState st = s.OpenPlayground(target);
  try {
    s.CommitPlayground(st);
    FAIL() << "expected a duplicate error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kAlreadyExists);
    EXPECT_NE(std::string(e.what()).find("rule " + std::to_string(target)),
              std::string::npos);
  }
  EXPECT_TRUE(s.events().empty());
  EXPECT_TRUE(s.custom_expressions().empty());
}

TEST_F(SessionTest, ExportRuleSet) {
  Session s = NewSession();
  EXPECT_EQ(CodeOf([&] { s.ExportRuleSet(); }), ErrorCode::kFailedPrecondition);
  s.Approve(RuleId(0));
  s.Approve(RuleId(1));
  s.Approve(RuleId(2));
  s.Disapprove(RuleId(3));
  const auto records = s.ExportRuleSet();
  ASSERT_EQ(records.size(), 3u);
  for (const auto &r : records) EXPECT_FALSE(r.weight.has_value());
  RuleSet rs = ResolveRuleSet(records, (*ws_)->catalog());
  EXPECT_EQ(ComputeMetrics(EvalRuleSet(rs, index()), index()), s.combined_metrics());
}

TEST_F(SessionTest, SaveLoadRoundTripsByteForByte) {
  Session s = NewSession("round");
  EXPECT_EQ(Session::Parse(s.Serialize(), *ws_, *model_).Serialize(), s.Serialize());
  s.Approve(RuleId(0));
  s.Disapprove(RuleId(1));
  PlaygroundState st = s.OpenPlayground(RuleId(0));
  int extra = 0;
  while (st.working.Contains(extra)) ++extra;
  st = ApplyPlaygroundEdit(st, {PlaygroundEdit::Op::kAdd, extra}, **ws_);
  try {
    s.CommitPlayground(st);
  } catch (const Error &) {
  }
  const std::string text = s.Serialize();
  Session loaded = Session::Parse(text, *ws_, *model_);
  EXPECT_TRUE(loaded.SameState(s));
  EXPECT_EQ(loaded.Serialize(), text);
  EXPECT_EQ(loaded.combined_metrics(), s.combined_metrics());
  Session replayed = Session::Replay("round", s.events(), *ws_, *model_);
  EXPECT_TRUE(replayed.SameState(s));

  auto dir = testing::ScratchDir("session");
  const std::string path = (dir / "s.json").string();
  s.Save(path);
  EXPECT_EQ(Session::Load(path, *ws_, *model_).Serialize(), text);
}

TEST_F(SessionTest, LoadRejectsOtherArtifacts) {
  Session s = NewSession();
  s.Approve(RuleId(0));
  const std::string text = s.Serialize();
  // Different corpus.
  SynthData other = GenerateSynthetic(testing::SmallSynthConfig(24, 500));
  auto other_ws = Workspace::Build(other.train, other.dictionaries, CatalogConfig{});
  EXPECT_EQ(CodeOf([&] { Session::Parse(text, other_ws, *model_); }),
            ErrorCode::kValidation);
  // Different model.
  auto other_model = std::make_shared<WeightedRuleModel>(**model_);
  other_model->bias += 1.0;
  EXPECT_EQ(CodeOf([&] { Session::Parse(text, *ws_, other_model); }),
            ErrorCode::kValidation);
  // Tampered state.
  std::string tampered = text;
  const auto pos = tampered.find("\"disapproved\": []");
  ASSERT_NE(pos, std::string::npos);
  tampered.replace(pos, 17, "\"disapproved\": [" + std::to_string(RuleId(5)) + "]");
  EXPECT_EQ(CodeOf([&] { Session::Parse(tampered, *ws_, *model_); }),
            ErrorCode::kValidation);
}

// Property: random operation sequences keep every session invariant.
TEST_F(SessionTest, RandomOperationsKeepInvariants) {
  Rng rng(77);
  for (int run = 0; run < 5; ++run) {
    Session s = NewSession("r" + std::to_string(run));
    for (int op = 0; op < 40; ++op) {
      const auto all = s.AllExpressions();
      const ExpressionId id = all[rng.Below(all.size())].id();
      const double before_recall = s.combined_metrics().recall;
      switch (rng.Below(4)) {
        case 0:
          if (s.mark(id) != Mark::kApproved) {
            s.Approve(id);
            EXPECT_GE(s.combined_metrics().recall, before_recall);
          }
          break;
        case 1: s.Disapprove(id); break;
        case 2: s.Unmark(id); break;
        default: {
          PlaygroundState st = s.OpenPlayground(id);
          const int p = static_cast<int>(rng.Below((*ws_)->catalog().size()));
          try {
            st = ApplyPlaygroundEdit(
                st, {st.working.Contains(p) ? PlaygroundEdit::Op::kDrop : PlaygroundEdit::Op::kAdd, p},
                **ws_);
            s.CommitPlayground(st);
          } catch (const Error &) {
          }
        }
      }
      for (ExpressionId a : s.approved()) ASSERT_EQ(s.disapproved().count(a), 0u);
      ASSERT_EQ(s.combined_metrics(), FromScratch(s));
    }
    Session replayed = Session::Replay(s.session_id(), s.events(), *ws_, *model_);
    EXPECT_TRUE(replayed.SameState(s));
    for (size_t i = 0; i < s.events().size(); ++i) EXPECT_EQ(s.events()[i].seq, static_cast<int>(i));
  }
}

TEST(EventKindTest, Names) {
  for (EventKind k : {EventKind::kApprove, EventKind::kDisapprove, EventKind::kUnmark,
                      EventKind::kCreateCustom, EventKind::kEditCustom}) {
    EXPECT_EQ(ParseEventKind(EventKindName(k)), k);
  }
  EXPECT_THROW(ParseEventKind("delete"), Error);
}

}  // namespace
}  // namespace rulewise
