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

#ifndef RULEWISE_SERVICE_STORE_H_
#define RULEWISE_SERVICE_STORE_H_

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rulewise/learner.h"
#include "rulewise/session.h"
#include "rulewise/workspace.h"

namespace rulewise::service {

// A model together with the workspace it resolves against.
struct Project {
  std::shared_ptr<const Workspace> workspace;
  std::shared_ptr<const WeightedRuleModel> model;
  std::string model_fingerprint;
};

// Loads a corpus (JSONL) and optional dictionaries file. An empty
// dicts_path means no dictionaries.
std::shared_ptr<const Workspace> LoadWorkspace(
    const std::string &corpus_path, const std::string &dicts_path,
    const CatalogConfig &config, std::span<const PredicateKey> extra = {});

// Loads data and a model file; the catalog is the data-driven one plus every
// predicate the model mentions.
Project LoadProject(const std::string &corpus_path,
                    const std::string &dicts_path,
                    const std::string &model_path);

// Hash of the data fingerprint and the ordered catalog; two workspaces with
// equal keys have equal indices.
std::string WorkspaceKey(const Workspace &workspace);

// Live session plus its open playgrounds. `mu` serializes every access.
struct SessionSlot {
  explicit SessionSlot(Session s) : session(std::move(s)) {}

  std::mutex mu;
  Session session;
  std::map<int64_t, PlaygroundState> playgrounds;
  int64_t next_playground_id = 1;
};

bool IsValidSessionId(std::string_view id);

// Artifacts keyed by content fingerprint, and live sessions keyed by id.
// Thread-safe.
class ProjectStore {
 public:
  explicit ProjectStore(std::string root = ".") : root_(std::move(root)) {}

  const std::string &root() const { return root_; }

  // Returns the stored instance when one with the same key exists, so an
  // artifact is never replaced under its fingerprint.
  std::shared_ptr<const Workspace> PutWorkspace(
      std::shared_ptr<const Workspace> workspace);
  std::shared_ptr<const Workspace> FindWorkspace(const std::string &key) const;
  Project PutProject(Project project);
  std::optional<Project> FindProject(const std::string &model_fingerprint) const;

  // Fresh session; `id` defaults to the next "sN". Throws kAlreadyExists
  // when the id is live and kInvalidArgument when it is malformed.
  std::shared_ptr<SessionSlot> CreateSession(const Project &project,
                                             std::optional<std::string> id = {},
                                             Session::Clock clock = {});
  // Takes ownership of an already-built session.
  std::shared_ptr<SessionSlot> AddSession(Session session);
  // Throws kNotFound.
  std::shared_ptr<SessionSlot> FindSession(const std::string &id) const;
  std::vector<std::string> SessionIds() const;

  // <root>/<id>.session.json
  std::string SessionPath(const std::string &id) const;

 private:
  std::string root_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Workspace>> workspaces_;
  std::map<std::string, Project> projects_;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions_;
  int next_session_ = 1;
};

}  // namespace rulewise::service

#endif  // RULEWISE_SERVICE_STORE_H_
