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

#ifndef RULEWISE_PREDICATE_H_
#define RULEWISE_PREDICATE_H_

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rulewise/corpus.h"
#include "rulewise/match_set.h"

namespace rulewise {

enum class PredicateKind { kActionProperty = 0, kDictionaryMatch = 1 };

// Pseudo-role that makes a dictionary predicate look up the action lemma
// instead of an argument.
inline constexpr std::string_view kActionLemmaRole = "action_lemma";

// What a predicate tests, independent of any catalog.
//   kActionProperty:  field = property name, value = expected value
//   kDictionaryMatch: field = role,          value = dictionary name
//
// Display grammar: `prop:<name>=<value>` and `dict:<role>@<dictionary>`.
struct PredicateKey {
  PredicateKind kind = PredicateKind::kActionProperty;
  std::string field;
  std::string value;

  static PredicateKey Property(std::string name, std::string value);
  static PredicateKey DictionaryMatch(std::string role, std::string dictionary);

  // Throws kInvalidArgument on text that is not in the display grammar, or
  // names an unknown property or role.
  static PredicateKey Parse(std::string_view display_name);
  std::string DisplayName() const;

  const std::string &property_name() const { return field; }
  const std::string &expected_value() const { return value; }
  const std::string &role() const { return field; }
  const std::string &dictionary_name() const { return value; }

  auto operator<=>(const PredicateKey &) const = default;
};

struct Predicate {
  int id = 0;
  PredicateKey key;
  std::string display_name;
};

// Where in a sentence a predicate was satisfied. token_start/token_end are
// -1 when the frame carries no locatable action token.
struct Highlight {
  int predicate_id = 0;
  int frame = 0;
  int token_start = -1;
  int token_end = -1;

  bool operator==(const Highlight &) const = default;
};

// True iff some frame of the sentence satisfies the predicate. Throws
// kNotFound when a dictionary predicate names a dictionary that is absent.
bool EvaluatePredicate(const PredicateKey &predicate, const Sentence &sentence,
                       const DictionarySet &dictionaries);

// Every satisfying site, in frame order. Empty iff EvaluatePredicate is
// false.
std::vector<Highlight> FindPredicateSites(const PredicateKey &predicate,
                                          int predicate_id,
                                          const Sentence &sentence,
                                          const DictionarySet &dictionaries);

struct CatalogConfig {
  int min_support = 5;
};

// Ids are 0..m-1 in insertion order.
class PredicateCatalog {
 public:
  // Returns the id of an equal predicate if present, else appends.
  int Intern(const PredicateKey &key);

  std::optional<int> Find(std::string_view display_name) const;
  const Predicate &at(int id) const { return predicates_.at(id); }
  const std::vector<Predicate> &predicates() const { return predicates_; }
  size_t size() const { return predicates_.size(); }
  bool empty() const { return predicates_.empty(); }

 private:
  std::vector<Predicate> predicates_;
  std::unordered_map<std::string, int> by_name_;
};

// All action-property pairs observed in the corpus, then all (role,
// dictionary) pairs, each kept when its sentence support reaches
// config.min_support. Ordered by kind, then field, then value.
PredicateCatalog BuildCatalog(const Corpus &corpus,
                              const DictionarySet &dictionaries,
                              const CatalogConfig &config);

// Predicate -> sentence bitset, plus the positive-label bitset.
class MatchIndex {
 public:
  MatchIndex() = default;
  MatchIndex(std::vector<MatchSet> predicate_matches, MatchSet labels);

  size_t corpus_size() const { return labels_.size(); }
  size_t num_predicates() const { return predicate_matches_.size(); }
  const MatchSet &matches(int predicate_id) const {
    return predicate_matches_.at(predicate_id);
  }
  const MatchSet &labels() const { return labels_; }
  int positives() const { return positives_; }

 private:
  std::vector<MatchSet> predicate_matches_;
  MatchSet labels_;
  int positives_ = 0;
};

MatchIndex BuildMatchIndex(const PredicateCatalog &catalog, const Corpus &corpus,
                           const DictionarySet &dictionaries);

}  // namespace rulewise

#endif  // RULEWISE_PREDICATE_H_
