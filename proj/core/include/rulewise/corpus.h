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

#ifndef RULEWISE_CORPUS_H_
#define RULEWISE_CORPUS_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace rulewise {

// Action properties a frame may carry. Values are free-form.
inline constexpr std::array<std::string_view, 6> kPropertyNames = {
    "tense", "aspect", "mood", "modalclass", "voice", "polarity"};

// Argument roles a frame may carry.
inline constexpr std::array<std::string_view, 7> kArgumentRoles = {
    "agent",
    "theme",
    "object",
    "beneficiary",
    "context:temporal",
    "context:locative",
    "manner"};

bool IsPropertyName(std::string_view name);
bool IsArgumentRole(std::string_view role);

// ASCII lowercase. Non-ASCII bytes pass through unchanged.
std::string ToLower(std::string_view text);

// A token range [token_start, token_end) inside the owning sentence.
struct ArgumentSpan {
  std::string text;
  int token_start = 0;
  int token_end = 0;

  bool operator==(const ArgumentSpan &) const = default;
};

// One shallow semantic frame: an action, its properties, and its arguments.
// action_span is optional; when present it locates the action token(s) for
// highlighting.
struct SlsFrame {
  std::string action_lemma;
  std::map<std::string, std::string> properties;
  std::map<std::string, std::vector<ArgumentSpan>> arguments;
  std::optional<ArgumentSpan> action_span;

  bool operator==(const SlsFrame &) const = default;
};

struct Sentence {
  int id = 0;              // dense, 0..n-1 after loading
  int64_t source_id = 0;   // the id found in the file
  std::string text;
  std::vector<std::string> tokens;
  std::vector<SlsFrame> frames;
  int label = 0;           // 0 or 1

  bool operator==(const Sentence &) const = default;
};

// Immutable collection of labeled sentences.
class Corpus {
 public:
  Corpus() = default;

  // Renumbers ids densely in the given order and counts labels. Throws
  // kValidation on a label outside {0,1} or a duplicate source_id.
  static Corpus FromSentences(std::vector<Sentence> sentences);

  const std::vector<Sentence> &sentences() const { return sentences_; }
  const Sentence &sentence(int id) const { return sentences_.at(id); }
  size_t size() const { return sentences_.size(); }
  bool empty() const { return sentences_.empty(); }
  int positives() const { return positives_; }
  int negatives() const { return negatives_; }

  bool operator==(const Corpus &) const = default;

 private:
  std::vector<Sentence> sentences_;
  int positives_ = 0;
  int negatives_ = 0;
};

struct Dictionary {
  std::string name;
  std::set<std::string> entries;  // lowercased

  // `surface` must already be lowercased.
  bool Contains(std::string_view surface) const {
    return entries.find(std::string(surface)) != entries.end();
  }

  bool operator==(const Dictionary &) const = default;
};

class DictionarySet {
 public:
  // Lowercases and deduplicates entries. Throws kValidation on an empty
  // dictionary and kAlreadyExists on a repeated name.
  void Add(std::string name, const std::vector<std::string> &entries);

  const Dictionary *Find(std::string_view name) const;
  const std::map<std::string, Dictionary, std::less<>> &all() const {
    return dictionaries_;
  }
  size_t size() const { return dictionaries_.size(); }
  bool empty() const { return dictionaries_.empty(); }

  bool operator==(const DictionarySet &) const = default;

 private:
  std::map<std::string, Dictionary, std::less<>> dictionaries_;
};

struct Violation {
  int sentence_id = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks one sentence against the frame, span and token invariants.
std::vector<std::string> ValidateSentence(const Sentence &sentence);

// Every invariant violation in the corpus, including id density and label
// bookkeeping. Empty iff the corpus is valid.
ValidationReport ValidateCorpus(const Corpus &corpus);

// JSONL, one sentence per line. Blank lines are skipped. Errors carry the
// 1-based line number.
Corpus ParseCorpus(std::istream &in);
Corpus LoadCorpus(const std::string &path);

// Inverse of ParseCorpus; "id" is written from source_id.
std::string SerializeCorpus(const Corpus &corpus);
void WriteCorpus(const Corpus &corpus, const std::string &path);

DictionarySet ParseDictionaries(std::string_view json_text);
DictionarySet LoadDictionaries(const std::string &path);
std::string SerializeDictionaries(const DictionarySet &dictionaries);

// Small file helpers shared by the loaders. Both throw kIo.
std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, std::string_view contents);

}  // namespace rulewise

#endif  // RULEWISE_CORPUS_H_
