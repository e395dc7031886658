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

#include "rulewise/predicate.h"

#include <algorithm>
#include <map>
#include <utility>

#include "rulewise/error.h"

namespace rulewise {

PredicateKey PredicateKey::Property(std::string name, std::string value) {
  return {PredicateKind::kActionProperty, std::move(name), std::move(value)};
}

PredicateKey PredicateKey::DictionaryMatch(std::string role, std::string dictionary) {
  return {PredicateKind::kDictionaryMatch, std::move(role),
          std::move(dictionary)};
}

PredicateKey PredicateKey::Parse(std::string_view text) {
  auto fail = [&](const std::string &why) -> PredicateKey {
    throw Error(ErrorCode::kInvalidArgument,
                "bad predicate \"" + std::string(text) + "\": " + why);
  };
  if (text.starts_with("prop:")) {
    std::string_view rest = text.substr(5);
    size_t eq = rest.find('=');
    if (eq == std::string_view::npos) return fail("expected prop:<name>=<value>");
    std::string_view name = rest.substr(0, eq);
    std::string_view value = rest.substr(eq + 1);
    if (!IsPropertyName(name)) return fail("unknown property name");
    if (value.empty()) return fail("empty property value");
    return Property(std::string(name), std::string(value));
  }
  if (text.starts_with("dict:")) {
    std::string_view rest = text.substr(5);
    size_t at = rest.find('@');
    if (at == std::string_view::npos) {
      return fail("expected dict:<role>@<dictionary>");
    }
    std::string_view role = rest.substr(0, at);
    std::string_view dict = rest.substr(at + 1);
    if (role != kActionLemmaRole && !IsArgumentRole(role)) {
      return fail("unknown role");
    }
    if (dict.empty()) return fail("empty dictionary name");
    return DictionaryMatch(std::string(role), std::string(dict));
  }
  return fail("expected prop: or dict: prefix");
}

std::string PredicateKey::DisplayName() const {
  if (kind == PredicateKind::kActionProperty) {
    return "prop:" + field + "=" + value;
  }
  return "dict:" + field + "@" + value;
}

namespace {

// Locates the action token of a frame: the explicit span if present, else
// the first token equal to the lemma, else the first token starting with the
// lemma minus a trailing 'e' ("transmit" -> "transmitted").
std::pair<int, int> ActionLocation(const SlsFrame &frame,
                                   const Sentence &sentence) {
  if (frame.action_span) {
    return {frame.action_span->token_start, frame.action_span->token_end};
  }
  const auto &lemma = frame.action_lemma;
  for (size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (ToLower(sentence.tokens[i]) == lemma) {
      return {static_cast<int>(i), static_cast<int>(i) + 1};
    }
  }
  std::string stem = lemma;
  if (stem.size() > 3 && stem.back() == 'e') stem.pop_back();
  if (stem.size() >= 3) {
    for (size_t i = 0; i < sentence.tokens.size(); ++i) {
      if (ToLower(sentence.tokens[i]).starts_with(stem)) {
        return {static_cast<int>(i), static_cast<int>(i) + 1};
      }
    }
  }
  return {-1, -1};
}

bool SpanInDictionary(const ArgumentSpan &span, const Sentence &sentence,
                      const Dictionary &dict) {
  if (dict.Contains(ToLower(span.text))) return true;
  for (int t = span.token_start; t < span.token_end; ++t) {
    if (dict.Contains(ToLower(sentence.tokens[t]))) return true;
  }
  return false;
}

// Calls visit(frame, token_start, token_end) for every satisfying site until
// it returns true. Returns whether any site was visited.
template <typename Visit>
bool VisitSites(const PredicateKey &key, const Sentence &sentence,
                const DictionarySet &dictionaries, Visit &&visit) {
  bool any = false;
  if (key.kind == PredicateKind::kActionProperty) {
    for (size_t f = 0; f < sentence.frames.size(); ++f) {
      const SlsFrame &frame = sentence.frames[f];
      auto it = frame.properties.find(key.property_name());
      if (it == frame.properties.end() || it->second != key.expected_value()) {
        continue;
      }
      any = true;
      auto [start, end] = ActionLocation(frame, sentence);
      if (visit(static_cast<int>(f), start, end)) return true;
    }
    return any;
  }

  const Dictionary *dict = dictionaries.Find(key.dictionary_name());
  if (dict == nullptr) {
    throw Error(ErrorCode::kNotFound,
                "unknown dictionary " + key.dictionary_name());
  }
  for (size_t f = 0; f < sentence.frames.size(); ++f) {
    const SlsFrame &frame = sentence.frames[f];
    if (key.role() == kActionLemmaRole) {
      if (!dict->Contains(frame.action_lemma)) continue;
      any = true;
      auto [start, end] = ActionLocation(frame, sentence);
      if (visit(static_cast<int>(f), start, end)) return true;
      continue;
    }
    auto it = frame.arguments.find(key.role());
    if (it == frame.arguments.end()) continue;
    for (const ArgumentSpan &span : it->second) {
      if (!SpanInDictionary(span, sentence, *dict)) continue;
      any = true;
      if (visit(static_cast<int>(f), span.token_start, span.token_end)) {
        return true;
      }
    }
  }
  return any;
}

}  // namespace

bool EvaluatePredicate(const PredicateKey &predicate, const Sentence &sentence,
                       const DictionarySet &dictionaries) {
  return VisitSites(predicate, sentence, dictionaries,
                    [](int, int, int) { return true; });
}

std::vector<Highlight> FindPredicateSites(const PredicateKey &predicate,
                                          int predicate_id,
                                          const Sentence &sentence,
                                          const DictionarySet &dictionaries) {
  std::vector<Highlight> sites;
  VisitSites(predicate, sentence, dictionaries, [&](int frame, int start, int end) {
    sites.push_back({predicate_id, frame, start, end});
    return false;
  });
  return sites;
}

int PredicateCatalog::Intern(const PredicateKey &key) {
  std::string name = key.DisplayName();
  auto it = by_name_.find(name);
  if (it != by_name_.end()) return it->second;
  const int id = static_cast<int>(predicates_.size());
  by_name_.emplace(name, id);
  predicates_.push_back({id, key, std::move(name)});
  return id;
}

std::optional<int> PredicateCatalog::Find(std::string_view display_name) const {
  auto it = by_name_.find(std::string(display_name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

PredicateCatalog BuildCatalog(const Corpus &corpus,
                              const DictionarySet &dictionaries,
                              const CatalogConfig &config) {
  // Sentence support of every observed property pair; `last` avoids counting
  // a sentence twice when several of its frames agree.
  struct Support {
    int count = 0;
    int last = -1;
  };
  std::map<PredicateKey, Support> observed;
  for (const Sentence &s : corpus.sentences()) {
    for (const SlsFrame &frame : s.frames) {
      for (const auto &[name, value] : frame.properties) {
        // Values containing the connective cannot survive a DSL round trip.
        if (value.find(" AND ") != std::string::npos) continue;
        Support &support = observed[PredicateKey::Property(name, value)];
        if (support.last != s.id) {
          support.last = s.id;
          ++support.count;
        }
      }
    }
  }

  std::vector<PredicateKey> keys;
  for (const auto &[key, support] : observed) {
    if (support.count >= config.min_support) keys.push_back(key);
  }

  std::vector<std::string> roles{std::string(kActionLemmaRole)};
  for (auto role : kArgumentRoles) roles.emplace_back(role);
  for (const auto &role : roles) {
    for (const auto &[name, dict] : dictionaries.all()) {
      PredicateKey key = PredicateKey::DictionaryMatch(role, name);
      int support = 0;
      for (const Sentence &s : corpus.sentences()) {
        support += EvaluatePredicate(key, s, dictionaries);
      }
      if (support >= config.min_support) keys.push_back(std::move(key));
    }
  }

  std::sort(keys.begin(), keys.end());
  PredicateCatalog catalog;
  for (const auto &key : keys) catalog.Intern(key);
  return catalog;
}

MatchIndex::MatchIndex(std::vector<MatchSet> predicate_matches, MatchSet labels)
    : predicate_matches_(std::move(predicate_matches)),
      labels_(std::move(labels)),
      positives_(static_cast<int>(labels_.Count())) {}

MatchIndex BuildMatchIndex(const PredicateCatalog &catalog, const Corpus &corpus,
                           const DictionarySet &dictionaries) {
  const size_t n = corpus.size();
  std::vector<MatchSet> matches;
  matches.reserve(catalog.size());
  for (const Predicate &p : catalog.predicates()) {
    MatchSet bits(n);
    for (const Sentence &s : corpus.sentences()) {
      if (EvaluatePredicate(p.key, s, dictionaries)) bits.Set(s.id);
    }
    matches.push_back(std::move(bits));
  }
  MatchSet labels(n);
  for (const Sentence &s : corpus.sentences()) {
    if (s.label == 1) labels.Set(s.id);
  }
  return MatchIndex(std::move(matches), std::move(labels));
}

}  // namespace rulewise
