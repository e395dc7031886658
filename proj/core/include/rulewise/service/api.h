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

#ifndef RULEWISE_SERVICE_API_H_
#define RULEWISE_SERVICE_API_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rulewise/error.h"
#include "rulewise/rule_engine.h"
#include "rulewise/service/store.h"

namespace rulewise::service {

// Transport-neutral request. `path` carries no query string; repeated query
// keys are kept.
struct ApiRequest {
  std::string method = "GET";
  std::string path;
  std::multimap<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON text
};

struct ApiOptions {
  // Where sessions are saved and loaded from.
  std::string session_dir = ".";
  // Timestamp source for session events; wall clock when empty.
  Session::Clock clock;
};

// HTTP status for an error code. 404 for unknown ids, 409 for conflicts,
// 422 for invalid edits and inputs.
int HttpStatusFor(ErrorCode code);

// The JSON API over one model and its workspace. Thread-safe: artifacts are
// immutable and each session is guarded by its own mutex.
//
// Routes (all bodies JSON):
//   GET  /api/health
//   GET  /api/predicates
//   GET  /api/rules?sort=&min_precision=&min_recall=&min_f1=&require=&exclude=
//                  &session=&status=&offset=&limit=
//   GET  /api/rules/{id}/examples?seed=&session=
//   GET  /api/sessions
//   POST /api/sessions                       {"session_id"?}
//   POST /api/sessions/load                  {"session_id"}
//   GET  /api/sessions/{sid}
//   GET  /api/sessions/{sid}/progress
//   GET  /api/sessions/{sid}/delta/{id}
//   POST /api/sessions/{sid}/rules/{id}/approve|disapprove|unmark
//   POST /api/sessions/{sid}/playground      {"rule_id"}
//   GET  /api/sessions/{sid}/playground/{pid}
//   POST /api/sessions/{sid}/playground/{pid}/edit   {"op", "predicate", "seed"?}
//   POST /api/sessions/{sid}/playground/{pid}/commit
//   POST /api/sessions/{sid}/save
//   GET  /api/sessions/{sid}/export
class WorkbenchApi {
 public:
  explicit WorkbenchApi(Project project, ApiOptions options = {});

  ApiResponse Handle(const ApiRequest &request);

  ProjectStore &store() { return store_; }
  const Project &project() const { return project_; }

 private:
  ApiResponse Dispatch(const ApiRequest &request);

  Project project_;
  ApiOptions options_;
  ProjectStore store_;
  std::vector<ScoredRule> model_scores_;
};

}  // namespace rulewise::service

#endif  // RULEWISE_SERVICE_API_H_
