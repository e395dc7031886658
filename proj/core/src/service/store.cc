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

#include "rulewise/service/store.h"

#include <filesystem>

#include "rulewise/error.h"

namespace rulewise::service {

std::shared_ptr<const Workspace> LoadWorkspace(
    const std::string &corpus_path, const std::string &dicts_path,
    const CatalogConfig &config, std::span<const PredicateKey> extra) {
  Corpus corpus = LoadCorpus(corpus_path);
  DictionarySet dictionaries;
  if (!dicts_path.empty()) dictionaries = LoadDictionaries(dicts_path);
  return Workspace::Build(std::move(corpus), std::move(dictionaries), config,
                          extra);
}

Project LoadProject(const std::string &corpus_path,
                    const std::string &dicts_path,
                    const std::string &model_path) {
  const ModelFile file = ParseModelFile(ReadFile(model_path));
  const std::vector<PredicateKey> extra = ReferencedPredicates(file.rules);
  CatalogConfig catalog_config;
  catalog_config.min_support = file.config.min_support;
  Project project;
  project.workspace =
      LoadWorkspace(corpus_path, dicts_path, catalog_config, extra);
  project.model = std::make_shared<const WeightedRuleModel>(
      ResolveModel(file, project.workspace->catalog()));
  project.model_fingerprint =
      ModelFingerprint(*project.model, project.workspace->catalog());
  return project;
}

std::string WorkspaceKey(const Workspace &workspace) {
  std::string data = workspace.fingerprint();
  for (const auto &p : workspace.catalog().predicates()) {
    data += '\x1e';
    data += p.display_name;
  }
  return Sha256Hex(data);
}

bool IsValidSessionId(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

std::shared_ptr<const Workspace> ProjectStore::PutWorkspace(
    std::shared_ptr<const Workspace> workspace) {
  const std::string key = WorkspaceKey(*workspace);
  std::lock_guard lock(mu_);
  auto [it, inserted] = workspaces_.emplace(key, std::move(workspace));
  return it->second;
}

std::shared_ptr<const Workspace> ProjectStore::FindWorkspace(
    const std::string &key) const {
  std::lock_guard lock(mu_);
  auto it = workspaces_.find(key);
  if (it == workspaces_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown workspace " + key);
  }
  return it->second;
}

Project ProjectStore::PutProject(Project project) {
  project.workspace = PutWorkspace(project.workspace);
  std::lock_guard lock(mu_);
  auto [it, inserted] =
      projects_.emplace(project.model_fingerprint, std::move(project));
  return it->second;
}

std::optional<Project> ProjectStore::FindProject(
    const std::string &model_fingerprint) const {
  std::lock_guard lock(mu_);
  auto it = projects_.find(model_fingerprint);
  if (it == projects_.end()) return std::nullopt;
  return it->second;
}

std::shared_ptr<SessionSlot> ProjectStore::CreateSession(
    const Project &project, std::optional<std::string> id,
    Session::Clock clock) {
  std::lock_guard lock(mu_);
  std::string session_id;
  if (id) {
    if (!IsValidSessionId(*id)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "session id must be 1-64 characters of [A-Za-z0-9_-]");
    }
    session_id = *id;
  } else {
    do {
      session_id = "s" + std::to_string(next_session_++);
    } while (sessions_.count(session_id));
  }
  if (sessions_.count(session_id)) {
    throw Error(ErrorCode::kAlreadyExists, "session " + session_id + " exists");
  }
  auto slot = std::make_shared<SessionSlot>(
      Session(session_id, project.workspace, project.model, std::move(clock)));
  sessions_.emplace(session_id, slot);
  return slot;
}

std::shared_ptr<SessionSlot> ProjectStore::AddSession(Session session) {
  std::lock_guard lock(mu_);
  const std::string id = session.session_id();
  if (sessions_.count(id)) {
    throw Error(ErrorCode::kAlreadyExists, "session " + id + " exists");
  }
  auto slot = std::make_shared<SessionSlot>(std::move(session));
  sessions_.emplace(id, slot);
  return slot;
}

std::shared_ptr<SessionSlot> ProjectStore::FindSession(
    const std::string &id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown session " + id);
  }
  return it->second;
}

std::vector<std::string> ProjectStore::SessionIds() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  for (const auto &[id, slot] : sessions_) ids.push_back(id);
  return ids;
}

std::string ProjectStore::SessionPath(const std::string &id) const {
  if (!IsValidSessionId(id)) {
    throw Error(ErrorCode::kInvalidArgument, "malformed session id " + id);
  }
  return (std::filesystem::path(root_) / (id + ".session.json")).string();
}

}  // namespace rulewise::service
