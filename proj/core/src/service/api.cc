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

#include "rulewise/service/api.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <sstream>

#include "json_util.h"
#include "rulewise/error.h"

namespace rulewise::service {

using internal::Json;

namespace {

// Malformed transport input (bad JSON, bad query values, unknown route).
struct HttpError {
  int status;
  std::string code;
  std::string message;
};

HttpError BadRequest(std::string message) {
  return {400, "bad_request", std::move(message)};
}

ApiResponse Respond(int status, const Json &body) {
  return {status, body.dump()};
}

ApiResponse ErrorResponse(int status, std::string_view code,
                          std::string_view message, Json details = nullptr) {
  Json error{{"code", code}, {"message", message}};
  if (!details.is_null()) error["details"] = std::move(details);
  return Respond(status, Json{{"error", std::move(error)}});
}

std::vector<std::string> SplitPath(std::string_view path) {
  std::vector<std::string> parts;
  size_t i = 0;
  while (i < path.size()) {
    size_t j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    if (j > i) parts.emplace_back(path.substr(i, j - i));
    i = j + 1;
  }
  return parts;
}

int64_t ParseInt(std::string_view text, std::string_view what) {
  int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw BadRequest(std::string(what) + " must be an integer, got \"" +
                     std::string(text) + "\"");
  }
  return value;
}

double ParseDouble(const std::string &text, std::string_view what) {
  size_t used = 0;
  double value = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw BadRequest(std::string(what) + " must be a number, got \"" + text +
                     "\"");
  }
  return value;
}

std::optional<std::string> QueryValue(const ApiRequest &request,
                                      const std::string &key) {
  auto it = request.query.find(key);
  if (it == request.query.end()) return std::nullopt;
  return it->second;
}

// All values of a repeatable key; each value may itself be comma-separated.
std::vector<std::string> QueryList(const ApiRequest &request,
                                   const std::string &key) {
  std::vector<std::string> out;
  auto [lo, hi] = request.query.equal_range(key);
  for (auto it = lo; it != hi; ++it) {
    std::string_view v = it->second;
    size_t i = 0;
    while (i <= v.size()) {
      size_t j = v.find(',', i);
      if (j == std::string_view::npos) j = v.size();
      if (j > i) out.emplace_back(v.substr(i, j - i));
      i = j + 1;
    }
  }
  return out;
}

Json ParseBody(const ApiRequest &request) {
  if (request.body.empty()) return Json::object();
  Json body = Json::parse(request.body, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded() || !body.is_object()) {
    throw BadRequest("request body must be a JSON object");
  }
  return body;
}

uint64_t SeedParam(const ApiRequest &request) {
  auto seed = QueryValue(request, "seed");
  if (!seed) return 0;
  const int64_t v = ParseInt(*seed, "seed");
  if (v < 0) throw BadRequest("seed must be non-negative");
  return static_cast<uint64_t>(v);
}

Json MetricsJson(const Metrics &m) {
  return Json{{"tp", m.tp},           {"fp", m.fp},
              {"fn", m.fn},           {"precision", m.precision},
              {"recall", m.recall},   {"f1", m.f1}};
}

Json PredicateRefs(const LinguisticExpression &e, const PredicateCatalog &catalog) {
  Json refs = Json::array();
  for (int p : e.predicate_ids()) {
    refs.push_back(Json{{"id", p}, {"name", catalog.at(p).display_name}});
  }
  return refs;
}

Json ExpressionJson(const LinguisticExpression &e, const PredicateCatalog &catalog) {
  return Json{{"expression", RenderExpression(e, catalog)},
              {"predicates", PredicateRefs(e, catalog)}};
}

Json DeltaJson(const DeltaReport &d) {
  return Json{{"base_metrics", MetricsJson(d.base_metrics)},
              {"combined_metrics", MetricsJson(d.combined_metrics)},
              {"delta_tp", d.delta_tp},
              {"delta_fp", d.delta_fp},
              {"new_match_ids", d.new_match_ids}};
}

const char *MarkName(Mark mark) {
  switch (mark) {
    case Mark::kApproved: return "approved";
    case Mark::kDisapproved: return "disapproved";
    case Mark::kNone: break;
  }
  return "none";
}

int PredicateArg(const Json &value, const PredicateCatalog &catalog) {
  if (value.is_number_integer()) {
    const int64_t id = value.get<int64_t>();
    if (id < 0 || id >= static_cast<int64_t>(catalog.size())) {
      throw Error(ErrorCode::kNotFound, "unknown predicate id " + std::to_string(id));
    }
    return static_cast<int>(id);
  }
  if (value.is_string()) {
    auto id = catalog.Find(value.get<std::string>());
    if (!id) {
      throw Error(ErrorCode::kNotFound,
                  "unknown predicate " + value.get<std::string>());
    }
    return *id;
  }
  throw BadRequest("predicate must be an id or a predicate name");
}

// Per-request state shared by the handlers.
struct Context {
  const Project &project;
  ProjectStore &store;
  const ApiOptions &options;
  const std::vector<ScoredRule> &model_scores;

  const Workspace &workspace() const { return *project.workspace; }
  const PredicateCatalog &catalog() const { return workspace().catalog(); }

  std::optional<double> WeightOf(ExpressionId id) const {
    for (const auto &r : project.model->rules) {
      if (r.expression.id() == id) return r.weight;
    }
    return std::nullopt;
  }
};

Json RuleJson(const Context &ctx, const ScoredRule &rule, const Session *session) {
  const ExpressionId id = rule.expression.id();
  Json j = ExpressionJson(rule.expression, ctx.catalog());
  j["id"] = id;
  const bool custom = session && session->IsCustom(id);
  j["custom"] = custom;
  auto weight = custom ? std::nullopt : ctx.WeightOf(id);
  j["weight"] = weight ? Json(*weight) : Json(nullptr);
  j["metrics"] = MetricsJson(rule.metrics);
  j["status"] = session ? MarkName(session->mark(id)) : "none";
  return j;
}

Json ProgressJson(const Session &session) {
  // Combined F1 after each event, replayed from the log.
  const MatchIndex &index = session.workspace().index();
  std::vector<ExpressionId> approved;
  Json history = Json::array();
  for (const Event &e : session.events()) {
    auto it = std::find(approved.begin(), approved.end(), e.expression_id);
    if (e.kind == EventKind::kApprove) {
      if (it == approved.end()) approved.push_back(e.expression_id);
    } else if (e.kind == EventKind::kDisapprove || e.kind == EventKind::kUnmark) {
      if (it != approved.end()) approved.erase(it);
    }
    MatchSet matches(index.corpus_size());
    for (ExpressionId id : approved) {
      matches |= EvalExpression(session.Resolve(id), index);
    }
    history.push_back(Json{{"seq", e.seq}, {"f1", ComputeMetrics(matches, index).f1}});
  }
  return Json{{"session_id", session.session_id()},
              {"approved_count", session.approved().size()},
              {"disapproved_count", session.disapproved().size()},
              {"custom_count", session.custom_expressions().size()},
              {"event_count", session.events().size()},
              {"metrics", MetricsJson(session.combined_metrics())},
              {"f1_history", std::move(history)}};
}

Json SessionJson(const Session &session) {
  Json j = Json::parse(session.Serialize());
  j["progress"] = ProgressJson(session);
  return j;
}

Json DiffJson(const ExpressionDiff &diff, const Corpus &corpus) {
  Json examples = Json::array();
  for (const auto &ex : diff.examples) {
    examples.push_back(Json{{"sentence_id", ex.sentence_id},
                            {"gained", ex.gained},
                            {"label", corpus.sentence(ex.sentence_id).label},
                            {"text", corpus.sentence(ex.sentence_id).text}});
  }
  return Json{{"gained", diff.gained}, {"lost", diff.lost},
              {"examples", std::move(examples)}};
}

Json PlaygroundJson(const Context &ctx, const std::string &session_id,
                    int64_t playground_id, const PlaygroundState &state) {
  return Json{{"session_id", session_id},
              {"playground_id", playground_id},
              {"base_id", state.base_id},
              {"base", ExpressionJson(state.base, ctx.catalog())},
              {"working", ExpressionJson(state.working, ctx.catalog())},
              {"metrics", MetricsJson(state.metrics)},
              {"base_delta", DeltaJson(state.base_delta)},
              {"last_diff", DiffJson(state.last_diff, ctx.workspace().corpus())}};
}

Json ExampleJson(const Context &ctx, const ExampleSentence &ex) {
  const Sentence &s = ctx.workspace().corpus().sentence(ex.sentence_id);
  Json highlights = Json::array();
  for (const auto &h : ex.highlights) {
    highlights.push_back(Json{{"predicate_id", h.predicate_id},
                              {"predicate", ctx.catalog().at(h.predicate_id).display_name},
                              {"frame", h.frame},
                              {"token_start", h.token_start},
                              {"token_end", h.token_end}});
  }
  return Json{{"sentence_id", s.id},     {"source_id", s.source_id},
              {"text", s.text},          {"tokens", s.tokens},
              {"label", s.label},        {"highlights", std::move(highlights)}};
}

ExpressionId RuleIdArg(const std::string &text) {
  return ParseInt(text, "rule id");
}

// Expression lookup without a session covers model rules only.
const LinguisticExpression &ResolveRule(const Context &ctx, ExpressionId id,
                                        const Session *session) {
  if (session) return session->Resolve(id);
  for (const auto &r : ctx.model_scores) {
    if (r.expression.id() == id) return r.expression;
  }
  throw Error(ErrorCode::kNotFound, "unknown rule " + std::to_string(id));
}

ApiResponse ListPredicates(const Context &ctx) {
  Json list = Json::array();
  const MatchIndex &index = ctx.workspace().index();
  for (const auto &p : ctx.catalog().predicates()) {
    list.push_back(Json{
        {"id", p.id},
        {"name", p.display_name},
        {"kind", p.key.kind == PredicateKind::kActionProperty ? "property" : "dictionary"},
        {"field", p.key.field},
        {"value", p.key.value},
        {"support", index.matches(p.id).Count()}});
  }
  return Respond(200, Json{{"predicates", std::move(list)}});
}

ApiResponse ListRules(const Context &ctx, const ApiRequest &request) {
  std::shared_ptr<SessionSlot> slot;
  if (auto sid = QueryValue(request, "session")) slot = ctx.store.FindSession(*sid);
  std::unique_lock<std::mutex> lock;
  if (slot) lock = std::unique_lock(slot->mu);
  const Session *session = slot ? &slot->session : nullptr;

  MetricKey key = MetricKey::kF1;
  if (auto sort = QueryValue(request, "sort")) {
    try {
      key = ParseMetricKey(*sort);
    } catch (const Error &e) {
      throw BadRequest(e.what());
    }
  }
  RuleFilter filter;
  for (MetricKey k : {MetricKey::kPrecision, MetricKey::kRecall, MetricKey::kF1}) {
    const std::string param = std::string("min_") + MetricKeyName(k);
    if (auto v = QueryValue(request, param)) {
      filter.min_metric[k] = ParseDouble(*v, param);
    }
  }
  for (const auto &name : QueryList(request, "require")) {
    filter.required_predicates.insert(PredicateArg(Json(name), ctx.catalog()));
  }
  for (const auto &name : QueryList(request, "exclude")) {
    filter.excluded_predicates.insert(PredicateArg(Json(name), ctx.catalog()));
  }
  std::optional<std::string> status = QueryValue(request, "status");
  if (status && *status != "none" && *status != "approved" &&
      *status != "disapproved" && *status != "any") {
    throw BadRequest("status must be one of any, none, approved, disapproved");
  }
  int64_t offset = 0;
  int64_t limit = -1;
  if (auto v = QueryValue(request, "offset")) offset = ParseInt(*v, "offset");
  if (auto v = QueryValue(request, "limit")) limit = ParseInt(*v, "limit");
  if (offset < 0) throw BadRequest("offset must be non-negative");

  std::vector<ScoredRule> rules = ctx.model_scores;
  if (session) {
    auto custom = ScoreRules(session->custom_expressions(), ctx.workspace().index());
    rules.insert(rules.end(), custom.begin(), custom.end());
  }
  rules = RankRules(FilterRules(std::move(rules), filter), key);

  Json list = Json::array();
  int64_t total = 0;
  for (const auto &rule : rules) {
    if (status && *status != "any") {
      const char *mark = session ? MarkName(session->mark(rule.expression.id())) : "none";
      if (*status != mark) continue;
    }
    if (total >= offset && (limit < 0 || total < offset + limit)) {
      list.push_back(RuleJson(ctx, rule, session));
    }
    ++total;
  }
  return Respond(200, Json{{"sort", MetricKeyName(key)},
                           {"total", total},
                           {"rules", std::move(list)}});
}

ApiResponse RuleExamples(const Context &ctx, const ApiRequest &request,
                         ExpressionId id) {
  std::shared_ptr<SessionSlot> slot;
  if (auto sid = QueryValue(request, "session")) slot = ctx.store.FindSession(*sid);
  std::unique_lock<std::mutex> lock;
  if (slot) lock = std::unique_lock(slot->mu);
  const Session *session = slot ? &slot->session : nullptr;
  const LinguisticExpression &e = ResolveRule(ctx, id, session);
  const ExampleSample sample = SampleExamples(e, ctx.workspace(), SeedParam(request));
  Json tps = Json::array();
  Json fps = Json::array();
  for (const auto &ex : sample.true_positives) tps.push_back(ExampleJson(ctx, ex));
  for (const auto &ex : sample.false_positives) fps.push_back(ExampleJson(ctx, ex));
  Json body = ExpressionJson(e, ctx.catalog());
  body["rule_id"] = id;
  body["seed"] = sample.seed;
  body["true_positives"] = std::move(tps);
  body["false_positives"] = std::move(fps);
  return Respond(200, body);
}

ApiResponse CreateSession(const Context &ctx, const ApiRequest &request) {
  const Json body = ParseBody(request);
  std::optional<std::string> id;
  if (internal::OptionalField(body, "session_id")) {
    id = internal::GetString(body, "session_id");
  }
  auto slot = ctx.store.CreateSession(ctx.project, id, ctx.options.clock);
  std::lock_guard lock(slot->mu);
  return Respond(201, SessionJson(slot->session));
}

ApiResponse LoadSession(const Context &ctx, const ApiRequest &request) {
  const Json body = ParseBody(request);
  const std::string id = internal::GetString(body, "session_id");
  const std::string path = ctx.store.SessionPath(id);
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kNotFound, "no saved session " + id + " at " + path);
  }
  Session session = Session::Load(path, ctx.project.workspace, ctx.project.model,
                                  ctx.options.clock);
  if (session.session_id() != id) {
    throw Error(ErrorCode::kValidation, "file " + path + " holds session " +
                                            session.session_id());
  }
  auto slot = ctx.store.AddSession(std::move(session));
  std::lock_guard lock(slot->mu);
  return Respond(200, SessionJson(slot->session));
}

ApiResponse ListSessions(const Context &ctx) {
  Json list = Json::array();
  for (const auto &id : ctx.store.SessionIds()) {
    auto slot = ctx.store.FindSession(id);
    std::lock_guard lock(slot->mu);
    const Session &s = slot->session;
    list.push_back(Json{{"session_id", id},
                        {"approved_count", s.approved().size()},
                        {"event_count", s.events().size()},
                        {"metrics", MetricsJson(s.combined_metrics())}});
  }
  return Respond(200, Json{{"sessions", std::move(list)}});
}

ApiResponse SessionRoute(const Context &ctx, const ApiRequest &request,
                         const std::vector<std::string> &parts) {
  // parts: api sessions {sid} ...
  auto slot = ctx.store.FindSession(parts[2]);
  std::lock_guard lock(slot->mu);
  Session &session = slot->session;
  const std::string &method = request.method;
  const size_t n = parts.size();

  if (n == 3 && method == "GET") return Respond(200, SessionJson(session));
  if (n == 4 && parts[3] == "progress" && method == "GET") {
    return Respond(200, ProgressJson(session));
  }
  if (n == 5 && parts[3] == "delta" && method == "GET") {
    const ExpressionId id = RuleIdArg(parts[4]);
    Json body = DeltaJson(session.LookAhead(id));
    body["rule_id"] = id;
    body["approved_metrics"] = MetricsJson(session.combined_metrics());
    return Respond(200, body);
  }
  if (n == 6 && parts[3] == "rules" && method == "POST") {
    const ExpressionId id = RuleIdArg(parts[4]);
    const std::string &action = parts[5];
    if (action == "approve") {
      session.Approve(id);
    } else if (action == "disapprove") {
      session.Disapprove(id);
    } else if (action == "unmark") {
      session.Unmark(id);
    } else {
      throw HttpError{404, "not_found", "unknown rule action " + action};
    }
    return Respond(200, Json{{"rule_id", id},
                             {"status", MarkName(session.mark(id))},
                             {"metrics", MetricsJson(session.combined_metrics())},
                             {"progress", ProgressJson(session)}});
  }
  if (n == 4 && parts[3] == "playground" && method == "POST") {
    const Json body = ParseBody(request);
    const ExpressionId id = internal::GetInt(body, "rule_id");
    PlaygroundState state = session.OpenPlayground(id);
    const int64_t pid = slot->next_playground_id++;
    auto it = slot->playgrounds.emplace(pid, std::move(state)).first;
    return Respond(201, PlaygroundJson(ctx, session.session_id(), pid, it->second));
  }
  if (n >= 5 && parts[3] == "playground") {
    const int64_t pid = ParseInt(parts[4], "playground id");
    auto it = slot->playgrounds.find(pid);
    if (it == slot->playgrounds.end()) {
      throw Error(ErrorCode::kNotFound, "unknown playground " + parts[4]);
    }
    if (n == 5 && method == "GET") {
      return Respond(200, PlaygroundJson(ctx, session.session_id(), pid, it->second));
    }
    if (n == 6 && parts[5] == "edit" && method == "POST") {
      const Json body = ParseBody(request);
      const std::string op = internal::GetString(body, "op");
      PlaygroundEdit edit;
      if (op == "add") {
        edit.op = PlaygroundEdit::Op::kAdd;
      } else if (op == "drop") {
        edit.op = PlaygroundEdit::Op::kDrop;
      } else {
        throw BadRequest("op must be \"add\" or \"drop\"");
      }
      edit.predicate_id = PredicateArg(internal::Field(body, "predicate"), ctx.catalog());
      uint64_t seed = 0;
      if (internal::OptionalField(body, "seed")) {
        const int64_t s = internal::GetInt(body, "seed");
        if (s < 0) throw BadRequest("seed must be non-negative");
        seed = static_cast<uint64_t>(s);
      }
      try {
        it->second = ApplyPlaygroundEdit(it->second, edit, ctx.workspace(), seed);
      } catch (const Error &e) {
        // The predicate exists; adding it twice or dropping an absent one is
        // an invalid edit.
        if (e.code() == ErrorCode::kAlreadyExists || e.code() == ErrorCode::kNotFound) {
          throw Error(ErrorCode::kInvalidArgument, e.what());
        }
        throw;
      }
      return Respond(200, PlaygroundJson(ctx, session.session_id(), pid, it->second));
    }
    if (n == 6 && parts[5] == "commit" && method == "POST") {
      ExpressionId id = kNoExpressionId;
      try {
        id = session.CommitPlayground(it->second);
      } catch (const Error &e) {
        if (e.code() != ErrorCode::kAlreadyExists) throw;
        Json details = nullptr;
        for (const auto &existing : session.AllExpressions()) {
          if (existing == it->second.working) {
            details = Json{{"existing_id", existing.id()}};
          }
        }
        return ErrorResponse(409, ErrorCodeName(e.code()), e.what(), details);
      }
      ScoredRule scored{session.Resolve(id),
                        ComputeMetrics(EvalExpression(session.Resolve(id),
                                                      ctx.workspace().index()),
                                       ctx.workspace().index())};
      return Respond(201, Json{{"id", id}, {"rule", RuleJson(ctx, scored, &session)}});
    }
  }
  if (n == 4 && parts[3] == "save" && method == "POST") {
    const std::string path = ctx.store.SessionPath(session.session_id());
    session.Save(path);
    return Respond(200, Json{{"session_id", session.session_id()}, {"path", path}});
  }
  if (n == 4 && parts[3] == "export" && method == "GET") {
    const auto records = session.ExportRuleSet();
    return Respond(200, Json::parse(SerializeRuleFile(records)));
  }
  throw HttpError{404, "not_found", "no route for " + method + " " + request.path};
}

}  // namespace

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kAlreadyExists:
    case ErrorCode::kFailedPrecondition: return 409;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kValidation: return 422;
    case ErrorCode::kIo: return 500;
  }
  return 500;
}

WorkbenchApi::WorkbenchApi(Project project, ApiOptions options)
    : project_(std::move(project)),
      options_(std::move(options)),
      store_(options_.session_dir) {
  project_ = store_.PutProject(std::move(project_));
  std::vector<LinguisticExpression> expressions;
  for (const auto &r : project_.model->rules) expressions.push_back(r.expression);
  model_scores_ = ScoreRules(expressions, project_.workspace->index());
}

ApiResponse WorkbenchApi::Handle(const ApiRequest &request) {
  try {
    return Dispatch(request);
  } catch (const HttpError &e) {
    return ErrorResponse(e.status, e.code, e.message);
  } catch (const Error &e) {
    return ErrorResponse(HttpStatusFor(e.code()), ErrorCodeName(e.code()), e.what());
  } catch (const Json::exception &e) {
    return ErrorResponse(400, "bad_request", e.what());
  } catch (const std::exception &e) {
    return ErrorResponse(500, "internal", e.what());
  }
}

ApiResponse WorkbenchApi::Dispatch(const ApiRequest &request) {
  const Context ctx{project_, store_, options_, model_scores_};
  const std::vector<std::string> parts = SplitPath(request.path);
  const std::string &method = request.method;
  const size_t n = parts.size();
  if (n < 2 || parts[0] != "api") {
    throw HttpError{404, "not_found", "no route for " + request.path};
  }
  const std::string &top = parts[1];
  if (top == "health" && n == 2 && method == "GET") {
    return Respond(200, Json{{"status", "ok"},
                             {"corpus_fingerprint", project_.workspace->fingerprint()},
                             {"model_fingerprint", project_.model_fingerprint},
                             {"sentences", project_.workspace->corpus().size()},
                             {"predicates", project_.workspace->catalog().size()},
                             {"rules", project_.model->rules.size()}});
  }
  if (top == "predicates" && n == 2 && method == "GET") return ListPredicates(ctx);
  if (top == "rules") {
    if (n == 2 && method == "GET") return ListRules(ctx, request);
    if (n == 4 && parts[3] == "examples" && method == "GET") {
      return RuleExamples(ctx, request, RuleIdArg(parts[2]));
    }
  }
  if (top == "sessions") {
    if (n == 2 && method == "GET") return ListSessions(ctx);
    if (n == 2 && method == "POST") return CreateSession(ctx, request);
    if (n == 3 && parts[2] == "load" && method == "POST") {
      return LoadSession(ctx, request);
    }
    if (n >= 3) return SessionRoute(ctx, request, parts);
  }
  throw HttpError{404, "not_found", "no route for " + method + " " + request.path};
}

}  // namespace rulewise::service
