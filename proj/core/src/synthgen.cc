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

#include "rulewise/synthgen.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "json_util.h"
#include "rulewise/error.h"
#include "rulewise/predicate.h"
#include "rulewise/rng.h"

namespace rulewise {

using internal::Json;

void SynthConfig::Validate() const {
  auto require = [](bool ok, const char *what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  require(n_sentences >= 2, "n_sentences must be >= 2");
  require(n_planted_rules >= 1, "n_planted_rules must be >= 1");
  require(min_planted_depth >= 1 && min_planted_depth <= max_planted_depth &&
              max_planted_depth <= 6,
          "planted depth range must satisfy 1 <= min <= max <= 6");
  require(label_noise >= 0 && label_noise < 0.5, "label_noise must be in [0, 0.5)");
  require(two_frame_rate >= 0 && two_frame_rate <= 1, "two_frame_rate must be in [0, 1]");
  require(train_fraction > 0 && train_fraction < 1,
          "train_fraction must be in (0, 1)");
  require(lemma_vocab >= 2 && argument_vocab >= 2, "vocabularies need >= 2 words");
  require(dictionary_size >= 1 && dictionary_size <= std::min(lemma_vocab, argument_vocab) / 2,
          "dictionary_size must be in [1, vocab / 2]");
  require(min_support >= 1, "min_support must be >= 1");
  require(min_rule_coverage >= 0 && min_rule_coverage <= max_rule_coverage &&
              max_rule_coverage <= 1,
          "rule coverage range is invalid");
  require(min_positive_rate >= 0 && min_positive_rate <= max_positive_rate &&
              max_positive_rate <= 1,
          "positive rate range is invalid");
  require(max_attempts >= 1, "max_attempts must be >= 1");
}

namespace {

Json SynthToJson(const SynthConfig &c) {
  return Json{{"rng_seed", c.rng_seed},
              {"n_sentences", c.n_sentences},
              {"n_planted_rules", c.n_planted_rules},
              {"min_planted_depth", c.min_planted_depth},
              {"max_planted_depth", c.max_planted_depth},
              {"label_noise", c.label_noise},
              {"two_frame_rate", c.two_frame_rate},
              {"lemma_vocab", c.lemma_vocab},
              {"argument_vocab", c.argument_vocab},
              {"dictionary_size", c.dictionary_size},
              {"train_fraction", c.train_fraction},
              {"min_support", c.min_support},
              {"min_rule_coverage", c.min_rule_coverage},
              {"max_rule_coverage", c.max_rule_coverage},
              {"min_positive_rate", c.min_positive_rate},
              {"max_positive_rate", c.max_positive_rate},
              {"max_attempts", c.max_attempts}};
}

}  // namespace

SynthConfig ParseSynthConfig(std::string_view json_text) {
  Json j = internal::ParseJson(json_text, "synth config");
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "synth config must be an object");
  }
  SynthConfig c;
  Json defaults = SynthToJson(c);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!defaults.contains(it.key())) {
      throw Error(ErrorCode::kInvalidArgument,
                  "synth config: unknown key \"" + it.key() + "\"");
    }
  }
  auto get_int = [&](const char *key, int &out) {
    if (j.contains(key)) out = static_cast<int>(internal::GetInt(j, key));
  };
  auto get_num = [&](const char *key, double &out) {
    if (j.contains(key)) out = internal::GetNumber(j, key);
  };
  if (j.contains("rng_seed")) {
    if (!j.at("rng_seed").is_number_unsigned()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "rng_seed must be a non-negative integer");
    }
    c.rng_seed = j.at("rng_seed").get<uint64_t>();
  }
  get_int("n_sentences", c.n_sentences);
  get_int("n_planted_rules", c.n_planted_rules);
  get_int("min_planted_depth", c.min_planted_depth);
  get_int("max_planted_depth", c.max_planted_depth);
  get_num("label_noise", c.label_noise);
  get_num("two_frame_rate", c.two_frame_rate);
  get_int("lemma_vocab", c.lemma_vocab);
  get_int("argument_vocab", c.argument_vocab);
  get_int("dictionary_size", c.dictionary_size);
  get_num("train_fraction", c.train_fraction);
  get_int("min_support", c.min_support);
  get_num("min_rule_coverage", c.min_rule_coverage);
  get_num("max_rule_coverage", c.max_rule_coverage);
  get_num("min_positive_rate", c.min_positive_rate);
  get_num("max_positive_rate", c.max_positive_rate);
  get_int("max_attempts", c.max_attempts);
  c.Validate();
  return c;
}

std::string SerializeSynthConfig(const SynthConfig &config) {
  return internal::DumpFile(SynthToJson(config));
}

namespace {

struct Categorical {
  std::string_view name;
  std::vector<std::pair<std::string_view, double>> values;
};

// Property value distributions; one value of each per frame.
const std::vector<Categorical> &PropertyDistributions() {
  static const std::vector<Categorical> kDistributions = {
      {"tense", {{"past", 0.40}, {"present", 0.45}, {"future", 0.15}}},
      {"aspect", {{"simple", 0.70}, {"progressive", 0.15}, {"perfect", 0.15}}},
      {"mood", {{"indicative", 0.80}, {"imperative", 0.10}, {"subjunctive", 0.10}}},
      {"modalclass",
       {{"none", 0.60}, {"may", 0.10}, {"must", 0.10}, {"shall", 0.15}, {"can", 0.05}}},
      {"voice", {{"active", 0.70}, {"passive", 0.30}}},
      {"polarity", {{"positive", 0.85}, {"negative", 0.15}}},
  };
  return kDistributions;
}

struct RoleProfile {
  std::string_view role;
  std::string_view stem;          // vocabulary words are stem + index
  std::string_view function_word; // optional leading token
  double presence;
  std::string_view dictionary;
};

const std::vector<RoleProfile> &RoleProfiles() {
  static const std::vector<RoleProfile> kRoles = {
      {"agent", "agent", "the", 0.85, "agents"},
      {"theme", "theme", "a", 0.70, "themes"},
      {"object", "object", "the", 0.40, "objects"},
      {"beneficiary", "party", "for", 0.25, "beneficiaries"},
      {"context:temporal", "day", "on", 0.30, "times"},
      {"context:locative", "place", "at", 0.25, "places"},
      {"manner", "manner", "", 0.20, "manners"},
  };
  return kRoles;
}

std::string_view Pick(const Categorical &dist, Rng &rng) {
  double u = rng.Uniform();
  for (const auto &[value, p] : dist.values) {
    if (u < p) return value;
    u -= p;
  }
  return dist.values.back().first;
}

std::string Word(std::string_view stem, uint64_t index) {
  return std::string(stem) + std::to_string(index);
}

void AppendSpan(Sentence &s, std::vector<std::string> words, SlsFrame &frame,
                const std::string &role) {
  ArgumentSpan span;
  span.token_start = static_cast<int>(s.tokens.size());
  for (auto &w : words) {
    if (!span.text.empty()) span.text += ' ';
    span.text += w;
    s.tokens.push_back(std::move(w));
  }
  span.token_end = static_cast<int>(s.tokens.size());
  frame.arguments[role].push_back(std::move(span));
}

Sentence GenerateSentence(const SynthConfig &config, int64_t source_id, Rng &rng) {
  Sentence s;
  s.source_id = source_id;
  const int n_frames = rng.Bernoulli(config.two_frame_rate) ? 2 : 1;
  for (int f = 0; f < n_frames; ++f) {
    if (f > 0) s.tokens.push_back("and");
    SlsFrame frame;
    frame.action_lemma = Word("verb", rng.Below(config.lemma_vocab));
    for (const auto &dist : PropertyDistributions()) {
      frame.properties[std::string(dist.name)] = std::string(Pick(dist, rng));
    }
    const auto &roles = RoleProfiles();
    // Agent precedes the action; the rest follow it.
    for (size_t r = 0; r < roles.size(); ++r) {
      const RoleProfile &profile = roles[r];
      if (r == 1) {
        ArgumentSpan action;
        action.text = frame.action_lemma;
        action.token_start = static_cast<int>(s.tokens.size());
        s.tokens.push_back(frame.action_lemma);
        action.token_end = action.token_start + 1;
        frame.action_span = std::move(action);
      }
      if (!rng.Bernoulli(profile.presence)) continue;
      std::vector<std::string> words;
      if (!profile.function_word.empty() && rng.Bernoulli(0.5)) {
        words.emplace_back(profile.function_word);
      }
      words.push_back(Word(profile.stem, rng.Below(config.argument_vocab)));
      AppendSpan(s, std::move(words), frame, std::string(profile.role));
    }
    s.frames.push_back(std::move(frame));
  }
  for (const auto &t : s.tokens) {
    if (!s.text.empty()) s.text += ' ';
    s.text += t;
  }
  return s;
}

std::vector<std::string> SampleEntries(std::string_view stem, int vocab, int size,
                                       Rng &rng) {
  std::vector<int> ids(vocab);
  for (int i = 0; i < vocab; ++i) ids[i] = i;
  rng.ShufflePrefix(std::span<int>(ids), size);
  ids.resize(size);
  std::sort(ids.begin(), ids.end());
  std::vector<std::string> entries;
  for (int id : ids) entries.push_back(Word(stem, id));
  return entries;
}

}  // namespace

SynthData GenerateSynthetic(const SynthConfig &config) {
  config.Validate();
  uint64_t seeder = config.rng_seed;
  Rng sentence_rng(SplitMix64(seeder));
  Rng dictionary_rng(SplitMix64(seeder));
  Rng rule_rng(SplitMix64(seeder));
  Rng noise_rng(SplitMix64(seeder));

  std::vector<Sentence> sentences;
  sentences.reserve(config.n_sentences);
  for (int i = 0; i < config.n_sentences; ++i) {
    sentences.push_back(GenerateSentence(config, i, sentence_rng));
  }

  SynthData data;
  // Two disjoint verb dictionaries, then one per argument role.
  {
    std::vector<std::string> verbs =
        SampleEntries("verb", config.lemma_vocab, 2 * config.dictionary_size,
                      dictionary_rng);
    std::vector<std::string> a, b;
    for (size_t i = 0; i < verbs.size(); ++i) (i % 2 == 0 ? a : b).push_back(verbs[i]);
    data.dictionaries.Add("verbs_a", a);
    data.dictionaries.Add("verbs_b", b);
    for (const auto &profile : RoleProfiles()) {
      data.dictionaries.Add(std::string(profile.dictionary),
                            SampleEntries(profile.stem, config.argument_vocab,
                                          config.dictionary_size, dictionary_rng));
    }
  }

  const int n_train = std::clamp(
      static_cast<int>(std::lround(config.n_sentences * config.train_fraction)), 1,
      config.n_sentences - 1);
  std::vector<Sentence> train_sentences(sentences.begin(),
                                        sentences.begin() + n_train);
  std::vector<Sentence> test_sentences(sentences.begin() + n_train,
                                       sentences.end());
  const Corpus unlabeled_train = Corpus::FromSentences(train_sentences);

  // Planted rules are drawn from predicates observed in train.
  CatalogConfig all_observed;
  all_observed.min_support = 2 * config.min_support;
  const PredicateCatalog catalog =
      BuildCatalog(unlabeled_train, data.dictionaries, all_observed);
  const MatchIndex index =
      BuildMatchIndex(catalog, unlabeled_train, data.dictionaries);
  std::vector<int> pool(catalog.size());
  for (size_t p = 0; p < pool.size(); ++p) pool[p] = static_cast<int>(p);

  struct Planted {
    std::vector<int> body;
    MatchSet matches;
  };
  std::vector<Planted> planted;
  const int min_unique = config.min_support;
  bool found = false;
  for (int attempt = 0; attempt < config.max_attempts && !found; ++attempt) {
    planted.clear();
    for (int tries = 0; tries < 2000 &&
                        static_cast<int>(planted.size()) < config.n_planted_rules;
         ++tries) {
      const int depth =
          config.min_planted_depth +
          static_cast<int>(rule_rng.Below(config.max_planted_depth -
                                          config.min_planted_depth + 1));
      if (depth > static_cast<int>(pool.size())) continue;
      rule_rng.ShufflePrefix(std::span<int>(pool), depth);
      std::vector<int> body(pool.begin(), pool.begin() + depth);
      std::sort(body.begin(), body.end());
      std::set<std::string> fields;
      bool distinct = true;
      for (int p : body) distinct &= fields.insert(catalog.at(p).key.field).second;
      if (!distinct) continue;

      MatchSet matches = index.matches(body[0]);
      for (size_t i = 1; i < body.size(); ++i) matches &= index.matches(body[i]);
      const int support = static_cast<int>(matches.Count());
      const double coverage = static_cast<double>(support) / n_train;
      if (support < 2 * config.min_support || coverage < config.min_rule_coverage ||
          coverage > config.max_rule_coverage) {
        continue;
      }
      // Pairwise disjoint bodies; in particular no rule subsumes another.
      bool overlaps = false;
      for (const auto &other : planted) {
        for (int p : body) {
          overlaps |= std::binary_search(other.body.begin(), other.body.end(), p);
        }
      }
      if (overlaps) continue;
      planted.push_back({std::move(body), std::move(matches)});
    }
    if (static_cast<int>(planted.size()) < config.n_planted_rules) continue;

    MatchSet truth(n_train);
    for (const auto &p : planted) truth |= p.matches;
    const double rate = static_cast<double>(truth.Count()) / n_train;
    if (rate < config.min_positive_rate || rate > config.max_positive_rate) continue;
    bool separable = true;
    for (size_t i = 0; i < planted.size(); ++i) {
      MatchSet others(n_train);
      for (size_t k = 0; k < planted.size(); ++k) {
        if (k != i) others |= planted[k].matches;
      }
      separable &= static_cast<int>(Difference(planted[i].matches, others).Count()) >=
                   min_unique;
    }
    found = separable;
  }
  if (!found) {
    throw Error(ErrorCode::kFailedPrecondition,
                "could not plant " + std::to_string(config.n_planted_rules) +
                    " qualifying rules in " + std::to_string(config.max_attempts) +
                    " attempts");
  }

  std::vector<std::vector<PredicateKey>> planted_keys;
  for (const auto &p : planted) {
    std::vector<PredicateKey> keys;
    std::string text;
    for (int id : p.body) {
      keys.push_back(catalog.at(id).key);
      if (!text.empty()) text += " AND ";
      text += catalog.at(id).display_name;
    }
    planted_keys.push_back(std::move(keys));
    data.planted_rules.push_back(std::move(text));
  }

  auto label = [&](Sentence &s) {
    bool truth = false;
    for (const auto &keys : planted_keys) {
      bool all = true;
      for (const auto &key : keys) {
        if (!EvaluatePredicate(key, s, data.dictionaries)) {
          all = false;
          break;
        }
      }
      truth |= all;
    }
    const bool flip = noise_rng.Bernoulli(config.label_noise);
    s.label = (truth != flip) ? 1 : 0;
  };
  for (auto &s : train_sentences) label(s);
  for (auto &s : test_sentences) label(s);
  data.train = Corpus::FromSentences(std::move(train_sentences));
  data.test = Corpus::FromSentences(std::move(test_sentences));
  return data;
}

}  // namespace rulewise
