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

#include <algorithm>
#include <ctime>

#include "json_util.h"
#include "rulewise/error.h"

namespace rulewise {

using internal::Json;

const char *EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kApprove: return "approve";
    case EventKind::kDisapprove: return "disapprove";
    case EventKind::kUnmark: return "unmark";
    case EventKind::kCreateCustom: return "create_custom";
    case EventKind::kEditCustom: return "edit_custom";
  }
  return "approve";
}

EventKind ParseEventKind(std::string_view name) {
  for (EventKind kind : {EventKind::kApprove, EventKind::kDisapprove,
                         EventKind::kUnmark, EventKind::kCreateCustom,
                         EventKind::kEditCustom}) {
    if (name == EventKindName(kind)) return kind;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown event kind \"" + std::string(name) + "\"");
}

std::string UtcTimestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string ModelFingerprint(const WeightedRuleModel &model,
                             const PredicateCatalog &catalog) {
  return Sha256Hex(SerializeModelFile(ToModelFile(model, catalog)));
}

PlaygroundState ApplyPlaygroundEdit(const PlaygroundState &state,
                                    const PlaygroundEdit &edit,
                                    const Workspace &workspace, uint64_t seed) {
  const MatchIndex &index = workspace.index();
  LinguisticExpression working =
      edit.op == PlaygroundEdit::Op::kAdd
          ? AddPredicate(state.working, edit.predicate_id)
          : DropPredicate(state.working, edit.predicate_id);
  const MatchSet before = EvalExpression(state.working, index);
  const MatchSet after = EvalExpression(working, index);

  PlaygroundState next{state.base_id, state.base, working,
                       ComputeMetrics(after, index),
                       ComputeDelta(EvalExpression(state.base, index), working,
                                    index),
                       {}};
  next.last_diff.gained = static_cast<int>(Difference(after, before).Count());
  next.last_diff.lost = static_cast<int>(Difference(before, after).Count());
  next.last_diff.examples =
      DiffExamples(state.working, working, index, kDiffExamples, seed);
  return next;
}

Session::Session(std::string session_id, std::shared_ptr<const Workspace> workspace,
                 std::shared_ptr<const WeightedRuleModel> model, Clock clock)
    : session_id_(std::move(session_id)),
      workspace_(std::move(workspace)),
      model_(std::move(model)),
      clock_(clock ? std::move(clock) : Clock(UtcTimestamp)),
      model_fingerprint_(ModelFingerprint(*model_, workspace_->catalog())),
      combined_matches_(workspace_->index().corpus_size()) {
  for (const auto &rule : model_->rules) {
    next_custom_id_ = std::max(next_custom_id_, rule.expression.id() + 1);
  }
  Recompute();
  created_at_ = clock_();
  updated_at_ = created_at_;
}

Mark Session::mark(ExpressionId id) const {
  if (std::find(approved_.begin(), approved_.end(), id) != approved_.end()) {
    return Mark::kApproved;
  }
  if (disapproved_.count(id) != 0) return Mark::kDisapproved;
  return Mark::kNone;
}

const LinguisticExpression &Session::Resolve(ExpressionId id) const {
  for (const auto &rule : model_->rules) {
    if (rule.expression.id() == id) return rule.expression;
  }
  for (const auto &e : custom_) {
    if (e.id() == id) return e;
  }
  throw Error(ErrorCode::kNotFound, "unknown expression " + std::to_string(id));
}

bool Session::IsCustom(ExpressionId id) const {
  return std::any_of(custom_.begin(), custom_.end(),
                     [id](const LinguisticExpression &e) { return e.id() == id; });
}

std::vector<LinguisticExpression> Session::AllExpressions() const {
  std::vector<LinguisticExpression> all;
  all.reserve(model_->rules.size() + custom_.size());
  for (const auto &rule : model_->rules) all.push_back(rule.expression);
  all.insert(all.end(), custom_.begin(), custom_.end());
  return all;
}

void Session::Recompute() {
  MatchSet matches(workspace_->index().corpus_size());
  for (ExpressionId id : approved_) {
    matches |= EvalExpression(Resolve(id), workspace_->index());
  }
  combined_metrics_ = ComputeMetrics(matches, workspace_->index());
  combined_matches_ = std::move(matches);
}

void Session::Apply(const Event &event) {
  switch (event.kind) {
    case EventKind::kApprove: {
      Resolve(event.expression_id);
      if (mark(event.expression_id) == Mark::kApproved) {
        throw Error(ErrorCode::kAlreadyExists,
                    "expression " + std::to_string(event.expression_id) +
                        " is already approved");
      }
      disapproved_.erase(event.expression_id);
      approved_.push_back(event.expression_id);
      Recompute();
      return;
    }
    case EventKind::kDisapprove:
    case EventKind::kUnmark: {
      Resolve(event.expression_id);
      auto it = std::find(approved_.begin(), approved_.end(), event.expression_id);
      if (it != approved_.end()) {
        approved_.erase(it);
        Recompute();
      }
      if (event.kind == EventKind::kDisapprove) {
        disapproved_.insert(event.expression_id);
      } else {
        disapproved_.erase(event.expression_id);
      }
      return;
    }
    case EventKind::kCreateCustom:
    case EventKind::kEditCustom: {
      if (event.expression_id != next_custom_id_) {
        throw Error(ErrorCode::kValidation,
                    "custom expression id " + std::to_string(event.expression_id) +
                        " out of sequence (expected " +
                        std::to_string(next_custom_id_) + ")");
      }
      LinguisticExpression e =
          ParseExpression(event.expression, workspace_->catalog());
      for (const auto &existing : AllExpressions()) {
        if (existing == e) {
          throw Error(ErrorCode::kAlreadyExists,
                      "expression duplicates rule " +
                          std::to_string(existing.id()));
        }
      }
      e.set_id(next_custom_id_++);
      custom_.push_back(std::move(e));
      return;
    }
  }
}

void Session::Record(Event event) {
  event.seq = static_cast<int>(events_.size());
  event.timestamp = clock_();
  Apply(event);
  updated_at_ = event.timestamp;
  events_.push_back(std::move(event));
}

Metrics Session::Approve(ExpressionId id) {
  Record({0, EventKind::kApprove, id, kNoExpressionId, "", ""});
  return combined_metrics_;
}

void Session::Disapprove(ExpressionId id) {
  Record({0, EventKind::kDisapprove, id, kNoExpressionId, "", ""});
}

void Session::Unmark(ExpressionId id) {
  Record({0, EventKind::kUnmark, id, kNoExpressionId, "", ""});
}

DeltaReport Session::LookAhead(ExpressionId id) const {
  const LinguisticExpression &candidate = Resolve(id);
  return ComputeDelta(ApprovedRuleSet(), candidate, workspace_->index());
}

PlaygroundState Session::OpenPlayground(ExpressionId id) const {
  const LinguisticExpression &base = Resolve(id);
  LinguisticExpression working(base.predicate_ids());
  const MatchIndex &index = workspace_->index();
  const MatchSet matches = EvalExpression(base, index);
  return PlaygroundState{id, base, working, ComputeMetrics(matches, index),
                         ComputeDelta(matches, working, index), {}};
}

ExpressionId Session::CommitPlayground(const PlaygroundState &state) {
  const ExpressionId id = next_custom_id_;
  const EventKind kind =
      IsCustom(state.base_id) ? EventKind::kEditCustom : EventKind::kCreateCustom;
  Record({0, kind, id, state.base_id,
          RenderExpression(state.working, workspace_->catalog()), ""});
  return id;
}

RuleSet Session::ApprovedRuleSet() const {
  RuleSet set;
  for (ExpressionId id : approved_) set.Add(Resolve(id));
  return set;
}

std::vector<RuleRecord> Session::ExportRuleSet() const {
  if (approved_.empty()) {
    throw Error(ErrorCode::kFailedPrecondition,
                "nothing approved in session " + session_id_);
  }
  std::vector<RuleRecord> records;
  for (ExpressionId id : approved_) {
    records.push_back(
        {id, RenderExpression(Resolve(id), workspace_->catalog()), std::nullopt});
  }
  return records;
}

bool Session::SameState(const Session &other) const {
  if (approved_ != other.approved_ || disapproved_ != other.disapproved_ ||
      events_ != other.events_ || custom_.size() != other.custom_.size()) {
    return false;
  }
  for (size_t i = 0; i < custom_.size(); ++i) {
    if (custom_[i].id() != other.custom_[i].id() ||
        !(custom_[i] == other.custom_[i])) {
      return false;
    }
  }
  return true;
}

namespace {

Json EventToJson(const Event &e) {
  Json j{{"seq", e.seq},
         {"kind", EventKindName(e.kind)},
         {"expression_id", e.expression_id},
         {"timestamp", e.timestamp}};
  if (e.kind == EventKind::kCreateCustom || e.kind == EventKind::kEditCustom) {
    j["base_id"] = e.base_id;
    j["expression"] = e.expression;
  }
  return j;
}

Event EventFromJson(const Json &j) {
  internal::CheckKeys(j, {"seq", "kind", "expression_id", "timestamp", "base_id",
                          "expression"},
                      "event");
  Event e;
  e.seq = static_cast<int>(internal::GetInt(j, "seq"));
  e.kind = ParseEventKind(internal::GetString(j, "kind"));
  e.expression_id = internal::GetInt(j, "expression_id");
  e.timestamp = internal::GetString(j, "timestamp");
  if (e.kind == EventKind::kCreateCustom || e.kind == EventKind::kEditCustom) {
    e.base_id = internal::GetInt(j, "base_id");
    e.expression = internal::GetString(j, "expression");
  }
  return e;
}

}  // namespace

std::string Session::Serialize() const {
  Json custom = Json::array();
  for (const auto &e : custom_) {
    custom.push_back(
        Json{{"id", e.id()},
             {"expression", RenderExpression(e, workspace_->catalog())}});
  }
  Json log = Json::array();
  for (const auto &e : events_) log.push_back(EventToJson(e));
  Json j{{"session_id", session_id_},
         {"model_fingerprint", model_fingerprint_},
         {"corpus_fingerprint", workspace_->fingerprint()},
         {"approved", approved_},
         {"disapproved", disapproved_},
         {"custom_expressions", std::move(custom)},
         {"event_log", std::move(log)},
         {"created_at", created_at_},
         {"updated_at", updated_at_}};
  return internal::DumpFile(j);
}

void Session::Save(const std::string &path) const { WriteFile(path, Serialize()); }

Session Session::Replay(std::string session_id, std::span<const Event> events,
                        std::shared_ptr<const Workspace> workspace,
                        std::shared_ptr<const WeightedRuleModel> model) {
  Session session(std::move(session_id), std::move(workspace), std::move(model));
  for (size_t i = 0; i < events.size(); ++i) {
    const Event &e = events[i];
    if (e.seq != static_cast<int>(i)) {
      throw Error(ErrorCode::kValidation,
                  "event sequence gap at " + std::to_string(i));
    }
    session.Apply(e);
    session.events_.push_back(e);
    session.updated_at_ = e.timestamp;
  }
  if (!events.empty()) session.created_at_ = events.front().timestamp;
  return session;
}

Session Session::Parse(std::string_view json_text,
                       std::shared_ptr<const Workspace> workspace,
                       std::shared_ptr<const WeightedRuleModel> model,
                       Clock clock) {
  Json j = internal::ParseJson(json_text, "session file");
  internal::CheckKeys(j,
                      {"session_id", "model_fingerprint", "corpus_fingerprint",
                       "approved", "disapproved", "custom_expressions",
                       "event_log", "created_at", "updated_at"},
                      "session file");
  const std::string corpus_fp = internal::GetString(j, "corpus_fingerprint");
  if (corpus_fp != workspace->fingerprint()) {
    throw Error(ErrorCode::kValidation,
                "session is bound to corpus " + corpus_fp +
                    ", not the loaded corpus " + workspace->fingerprint());
  }
  const std::string model_fp = internal::GetString(j, "model_fingerprint");
  const std::string actual_model_fp = ModelFingerprint(*model, workspace->catalog());
  if (model_fp != actual_model_fp) {
    throw Error(ErrorCode::kValidation,
                "session is bound to model " + model_fp +
                    ", not the loaded model " + actual_model_fp);
  }

  std::vector<Event> events;
  const Json &log = internal::Field(j, "event_log");
  if (!log.is_array()) {
    throw Error(ErrorCode::kInvalidArgument, "event_log must be an array");
  }
  for (const Json &e : log) events.push_back(EventFromJson(e));

  Session session = Replay(internal::GetString(j, "session_id"), events,
                           std::move(workspace), std::move(model));
  if (clock) session.clock_ = std::move(clock);
  session.created_at_ = internal::GetString(j, "created_at");
  session.updated_at_ = internal::GetString(j, "updated_at");

  auto stored_approved = internal::Field(j, "approved").get<std::vector<ExpressionId>>();
  auto stored_disapproved =
      internal::Field(j, "disapproved").get<std::set<ExpressionId>>();
  std::vector<std::pair<ExpressionId, std::string>> stored_custom;
  for (const Json &c : internal::Field(j, "custom_expressions")) {
    stored_custom.emplace_back(internal::GetInt(c, "id"),
                               internal::GetString(c, "expression"));
  }
  std::vector<std::pair<ExpressionId, std::string>> replayed_custom;
  for (const auto &e : session.custom_) {
    replayed_custom.emplace_back(
        e.id(), RenderExpression(e, session.workspace_->catalog()));
  }
  if (stored_approved != session.approved_ ||
      stored_disapproved != session.disapproved_ ||
      stored_custom != replayed_custom) {
    throw Error(ErrorCode::kValidation,
                "session state does not match its event log");
  }
  return session;
}

Session Session::Load(const std::string &path,
                      std::shared_ptr<const Workspace> workspace,
                      std::shared_ptr<const WeightedRuleModel> model, Clock clock) {
  return Parse(ReadFile(path), std::move(workspace), std::move(model),
               std::move(clock));
}

}  // namespace rulewise
