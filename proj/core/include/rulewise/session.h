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

#ifndef RULEWISE_SESSION_H_
#define RULEWISE_SESSION_H_

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rulewise/learner.h"
#include "rulewise/rule_engine.h"
#include "rulewise/workspace.h"

namespace rulewise {

enum class EventKind { kApprove, kDisapprove, kUnmark, kCreateCustom, kEditCustom };

const char *EventKindName(EventKind kind);
EventKind ParseEventKind(std::string_view name);

struct Event {
  int seq = 0;
  EventKind kind = EventKind::kApprove;
  ExpressionId expression_id = kNoExpressionId;
  // Custom events only: the expression the playground was opened from, and
  // the committed expression text.
  ExpressionId base_id = kNoExpressionId;
  std::string expression;
  std::string timestamp;  // wall clock, informational

  bool operator==(const Event &) const = default;
};

enum class Mark { kNone, kApproved, kDisapproved };

struct PlaygroundEdit {
  enum class Op { kAdd, kDrop };
  Op op = Op::kAdd;
  int predicate_id = 0;
};

struct ExpressionDiff {
  int gained = 0;
  int lost = 0;
  std::vector<DiffExample> examples;
};

struct PlaygroundState {
  ExpressionId base_id = kNoExpressionId;
  LinguisticExpression base;
  LinguisticExpression working;
  Metrics metrics;            // of `working`
  DeltaReport base_delta;     // `working` against `base` alone
  ExpressionDiff last_diff;   // against the previous working expression
};

inline constexpr size_t kDiffExamples = 8;

// State after one edit; throws whatever DropPredicate/AddPredicate throw.
PlaygroundState ApplyPlaygroundEdit(const PlaygroundState &state,
                                    const PlaygroundEdit &edit,
                                    const Workspace &workspace,
                                    uint64_t seed = 0);

// One expert's approve/disapprove decisions and playground rules over a
// fixed model and workspace. Every mutation is recorded as an Event, and the
// state is always the fold of the event log.
class Session {
 public:
  using Clock = std::function<std::string()>;

  Session(std::string session_id, std::shared_ptr<const Workspace> workspace,
          std::shared_ptr<const WeightedRuleModel> model, Clock clock = {});

  const std::string &session_id() const { return session_id_; }
  const std::vector<ExpressionId> &approved() const { return approved_; }
  const std::set<ExpressionId> &disapproved() const { return disapproved_; }
  const std::vector<LinguisticExpression> &custom_expressions() const {
    return custom_;
  }
  const std::vector<Event> &events() const { return events_; }
  const Metrics &combined_metrics() const { return combined_metrics_; }
  const MatchSet &combined_matches() const { return combined_matches_; }
  const std::string &created_at() const { return created_at_; }
  const std::string &updated_at() const { return updated_at_; }
  const std::string &model_fingerprint() const { return model_fingerprint_; }
  const std::string &corpus_fingerprint() const {
    return workspace_->fingerprint();
  }
  const Workspace &workspace() const { return *workspace_; }
  const WeightedRuleModel &model() const { return *model_; }

  Mark mark(ExpressionId id) const;

  // Throws kNotFound.
  const LinguisticExpression &Resolve(ExpressionId id) const;
  bool IsCustom(ExpressionId id) const;
  // Model rules, then custom expressions.
  std::vector<LinguisticExpression> AllExpressions() const;

  // Throws kAlreadyExists when already approved, kNotFound on unknown ids.
  Metrics Approve(ExpressionId id);
  void Disapprove(ExpressionId id);
  void Unmark(ExpressionId id);

  // Look-ahead of approving `id`; throws kAlreadyExists if approved.
  DeltaReport LookAhead(ExpressionId id) const;

  PlaygroundState OpenPlayground(ExpressionId id) const;
  // Stores the working expression under a fresh id. Not approved. Throws
  // kAlreadyExists, naming the existing id, when the body duplicates a model
  // or custom expression.
  ExpressionId CommitPlayground(const PlaygroundState &state);

  RuleSet ApprovedRuleSet() const;
  // Weight-free records of the approved expressions. Throws
  // kFailedPrecondition when nothing is approved.
  std::vector<RuleRecord> ExportRuleSet() const;

  // Same approved/disapproved/custom state and event log.
  bool SameState(const Session &other) const;

  // Canonical JSON; identical state gives identical bytes.
  std::string Serialize() const;
  void Save(const std::string &path) const;

  // Rebuilds the session by replaying its event log. Throws kValidation on a
  // fingerprint mismatch or when the stored sets disagree with the replay.
  static Session Parse(std::string_view json_text,
                       std::shared_ptr<const Workspace> workspace,
                       std::shared_ptr<const WeightedRuleModel> model,
                       Clock clock = {});
  static Session Load(const std::string &path,
                      std::shared_ptr<const Workspace> workspace,
                      std::shared_ptr<const WeightedRuleModel> model,
                      Clock clock = {});

  static Session Replay(std::string session_id, std::span<const Event> events,
                        std::shared_ptr<const Workspace> workspace,
                        std::shared_ptr<const WeightedRuleModel> model);

 private:
  void Record(Event event);
  void Apply(const Event &event);
  void Recompute();

  std::string session_id_;
  std::shared_ptr<const Workspace> workspace_;
  std::shared_ptr<const WeightedRuleModel> model_;
  Clock clock_;
  std::string model_fingerprint_;
  ExpressionId next_custom_id_ = 0;

  std::vector<ExpressionId> approved_;
  std::set<ExpressionId> disapproved_;
  std::vector<LinguisticExpression> custom_;
  std::vector<Event> events_;
  MatchSet combined_matches_;
  Metrics combined_metrics_;
  std::string created_at_;
  std::string updated_at_;
};

std::string ModelFingerprint(const WeightedRuleModel &model,
                             const PredicateCatalog &catalog);

// UTC, ISO-8601 with seconds.
std::string UtcTimestamp();

}  // namespace rulewise

#endif  // RULEWISE_SESSION_H_
