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

#ifndef RULEWISE_WORKSPACE_H_
#define RULEWISE_WORKSPACE_H_

#include <memory>
#include <span>
#include <string>

#include "rulewise/corpus.h"
#include "rulewise/predicate.h"

namespace rulewise {

// The immutable evaluation substrate shared by the rule engine, sessions and
// the service: corpus, dictionaries, predicate catalog and its match index.
class Workspace {
 public:
  // Builds the index for an already-assembled catalog.
  Workspace(Corpus corpus, DictionarySet dictionaries, PredicateCatalog catalog);

  // Data-driven catalog, plus any `extra` predicates (e.g. those referenced
  // by a loaded model) appended after it.
  static std::shared_ptr<const Workspace> Build(
      Corpus corpus, DictionarySet dictionaries, const CatalogConfig &config,
      std::span<const PredicateKey> extra = {});

  const Corpus &corpus() const { return corpus_; }
  const DictionarySet &dictionaries() const { return dictionaries_; }
  const PredicateCatalog &catalog() const { return catalog_; }
  const MatchIndex &index() const { return index_; }

  // Content hash of the corpus and dictionaries.
  const std::string &fingerprint() const { return fingerprint_; }

 private:
  Corpus corpus_;
  DictionarySet dictionaries_;
  PredicateCatalog catalog_;
  MatchIndex index_;
  std::string fingerprint_;
};

// Hex SHA-256.
std::string Sha256Hex(std::string_view data);

std::string DataFingerprint(const Corpus &corpus,
                            const DictionarySet &dictionaries);

}  // namespace rulewise

#endif  // RULEWISE_WORKSPACE_H_
