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

#include "rulewise/corpus.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>

#include "json_util.h"
#include "rulewise/error.h"

namespace rulewise {

using internal::Json;

bool IsPropertyName(std::string_view name) {
  return std::find(kPropertyNames.begin(), kPropertyNames.end(), name) !=
         kPropertyNames.end();
}

bool IsArgumentRole(std::string_view role) {
  return std::find(kArgumentRoles.begin(), kArgumentRoles.end(), role) !=
         kArgumentRoles.end();
}

std::string ToLower(std::string_view text) {
  std::string out(text);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

Corpus Corpus::FromSentences(std::vector<Sentence> sentences) {
  Corpus corpus;
  std::unordered_set<int64_t> seen;
  for (size_t i = 0; i < sentences.size(); ++i) {
    Sentence &s = sentences[i];
    if (s.label != 0 && s.label != 1) {
      throw Error(ErrorCode::kValidation,
                  "sentence " + std::to_string(s.source_id) +
                      ": label must be 0 or 1");
    }
    if (!seen.insert(s.source_id).second) {
      throw Error(ErrorCode::kValidation,
                  "duplicate sentence id " + std::to_string(s.source_id));
    }
    s.id = static_cast<int>(i);
    if (s.label == 1) {
      ++corpus.positives_;
    } else {
      ++corpus.negatives_;
    }
  }
  corpus.sentences_ = std::move(sentences);
  return corpus;
}

void DictionarySet::Add(std::string name, const std::vector<std::string> &entries) {
  if (entries.empty()) {
    throw Error(ErrorCode::kValidation, "empty dictionary " + name);
  }
  if (dictionaries_.count(name) != 0) {
    throw Error(ErrorCode::kAlreadyExists, "duplicate dictionary " + name);
  }
  Dictionary dict;
  dict.name = name;
  for (const auto &e : entries) {
    if (e.empty()) {
      throw Error(ErrorCode::kValidation,
                  "dictionary " + name + " has an empty entry");
    }
    dict.entries.insert(ToLower(e));
  }
  dictionaries_.emplace(std::move(name), std::move(dict));
}

const Dictionary *DictionarySet::Find(std::string_view name) const {
  auto it = dictionaries_.find(name);
  return it == dictionaries_.end() ? nullptr : &it->second;
}

namespace {

std::string JoinTokens(const std::vector<std::string> &tokens, int start,
                       int end) {
  std::string out;
  for (int i = start; i < end; ++i) {
    if (i > start) out += ' ';
    out += tokens[i];
  }
  return out;
}

void CheckSpan(const ArgumentSpan &span, const std::vector<std::string> &tokens,
               const std::string &where, std::vector<std::string> &problems) {
  const int n = static_cast<int>(tokens.size());
  if (span.token_start < 0 || span.token_start >= span.token_end ||
      span.token_end > n) {
    problems.push_back(where + ": span [" + std::to_string(span.token_start) +
                       ", " + std::to_string(span.token_end) +
                       ") outside token range of length " + std::to_string(n));
    return;
  }
  std::string joined = JoinTokens(tokens, span.token_start, span.token_end);
  if (joined != span.text) {
    problems.push_back(where + ": span text \"" + span.text +
                       "\" does not match tokens \"" + joined + "\"");
  }
}

}  // namespace

std::vector<std::string> ValidateSentence(const Sentence &sentence) {
  std::vector<std::string> problems;
  if (!sentence.text.empty() && sentence.tokens.empty()) {
    problems.push_back("text is non-empty but tokens are empty");
  }
  for (size_t f = 0; f < sentence.frames.size(); ++f) {
    const SlsFrame &frame = sentence.frames[f];
    const std::string where = "frame " + std::to_string(f);
    if (frame.action_lemma.empty()) {
      problems.push_back(where + ": empty action lemma");
    } else if (ToLower(frame.action_lemma) != frame.action_lemma) {
      problems.push_back(where + ": action lemma \"" + frame.action_lemma +
                         "\" is not lowercase");
    }
    for (const auto &[name, value] : frame.properties) {
      if (!IsPropertyName(name)) {
        problems.push_back(where + ": unknown property name \"" + name + "\"");
      } else if (value.empty()) {
        problems.push_back(where + ": empty value for property \"" + name +
                           "\"");
      }
    }
    for (const auto &[role, spans] : frame.arguments) {
      if (!IsArgumentRole(role)) {
        problems.push_back(where + ": unknown argument role \"" + role + "\"");
      }
      for (const auto &span : spans) {
        CheckSpan(span, sentence.tokens, where + " " + role, problems);
      }
    }
    if (frame.action_span) {
      CheckSpan(*frame.action_span, sentence.tokens, where + " action",
                problems);
    }
  }
  return problems;
}

ValidationReport ValidateCorpus(const Corpus &corpus) {
  ValidationReport report;
  int positives = 0;
  std::unordered_set<int64_t> source_ids;
  const auto &sentences = corpus.sentences();
  for (size_t i = 0; i < sentences.size(); ++i) {
    const Sentence &s = sentences[i];
    for (auto &message : ValidateSentence(s)) {
      report.violations.push_back({s.id, std::move(message)});
    }
    if (s.id != static_cast<int>(i)) {
      report.violations.push_back(
          {s.id, "id is not dense (expected " + std::to_string(i) + ")"});
    }
    if (!source_ids.insert(s.source_id).second) {
      report.violations.push_back({s.id, "duplicate source id"});
    }
    if (s.label != 0 && s.label != 1) {
      report.violations.push_back({s.id, "label must be 0 or 1"});
    }
    positives += s.label == 1;
  }
  if (positives != corpus.positives() ||
      corpus.positives() + corpus.negatives() !=
          static_cast<int>(sentences.size())) {
    report.violations.push_back({-1, "label counts do not match labels"});
  }
  return report;
}

namespace {

ArgumentSpan SpanFromJson(const Json &j) {
  internal::CheckKeys(j, {"text", "token_start", "token_end"}, "span");
  ArgumentSpan span;
  span.text = internal::GetString(j, "text");
  span.token_start = static_cast<int>(internal::GetInt(j, "token_start"));
  span.token_end = static_cast<int>(internal::GetInt(j, "token_end"));
  return span;
}

Json SpanToJson(const ArgumentSpan &span) {
  return Json{{"text", span.text},
              {"token_start", span.token_start},
              {"token_end", span.token_end}};
}

SlsFrame FrameFromJson(const Json &j) {
  internal::CheckKeys(j, {"action_lemma", "properties", "arguments", "action_span"},
                      "frame");
  SlsFrame frame;
  frame.action_lemma = internal::GetString(j, "action_lemma");
  if (const Json *props = internal::OptionalField(j, "properties")) {
    if (!props->is_object()) {
      throw Error(ErrorCode::kInvalidArgument, "properties must be an object");
    }
    for (auto it = props->begin(); it != props->end(); ++it) {
      if (!it.value().is_string()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "property \"" + it.key() + "\" must be a string");
      }
      frame.properties[it.key()] = it.value().get<std::string>();
    }
  }
  if (const Json *args = internal::OptionalField(j, "arguments")) {
    if (!args->is_object()) {
      throw Error(ErrorCode::kInvalidArgument, "arguments must be an object");
    }
    for (auto it = args->begin(); it != args->end(); ++it) {
      if (!it.value().is_array()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "argument \"" + it.key() + "\" must be an array");
      }
      auto &spans = frame.arguments[it.key()];
      for (const Json &s : it.value()) spans.push_back(SpanFromJson(s));
    }
  }
  if (const Json *action = internal::OptionalField(j, "action_span")) {
    frame.action_span = SpanFromJson(*action);
  }
  return frame;
}

Json FrameToJson(const SlsFrame &frame) {
  Json args = Json::object();
  for (const auto &[role, spans] : frame.arguments) {
    Json arr = Json::array();
    for (const auto &s : spans) arr.push_back(SpanToJson(s));
    args[role] = std::move(arr);
  }
  Json j{{"action_lemma", frame.action_lemma},
         {"properties", Json(frame.properties)},
         {"arguments", std::move(args)}};
  if (frame.action_span) j["action_span"] = SpanToJson(*frame.action_span);
  return j;
}

Sentence SentenceFromJson(const Json &j) {
  internal::CheckKeys(j, {"id", "text", "tokens", "label", "frames"}, "sentence");
  Sentence s;
  s.source_id = internal::GetInt(j, "id");
  s.text = internal::GetString(j, "text");
  const Json &tokens = internal::Field(j, "tokens");
  if (!tokens.is_array()) {
    throw Error(ErrorCode::kInvalidArgument, "tokens must be an array");
  }
  for (const Json &t : tokens) {
    if (!t.is_string()) {
      throw Error(ErrorCode::kInvalidArgument, "tokens must be strings");
    }
    s.tokens.push_back(t.get<std::string>());
  }
  const int64_t label = internal::GetInt(j, "label");
  if (label != 0 && label != 1) {
    throw Error(ErrorCode::kValidation,
                "label must be 0 or 1, got " + std::to_string(label));
  }
  s.label = static_cast<int>(label);
  if (const Json *frames = internal::OptionalField(j, "frames")) {
    if (!frames->is_array()) {
      throw Error(ErrorCode::kInvalidArgument, "frames must be an array");
    }
    for (const Json &f : *frames) s.frames.push_back(FrameFromJson(f));
  }
  return s;
}

Json SentenceToJson(const Sentence &s) {
  Json frames = Json::array();
  for (const auto &f : s.frames) frames.push_back(FrameToJson(f));
  return Json{{"id", s.source_id},
              {"text", s.text},
              {"tokens", s.tokens},
              {"label", s.label},
              {"frames", std::move(frames)}};
}

bool IsBlank(const std::string &line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  });
}

}  // namespace

Corpus ParseCorpus(std::istream &in) {
  std::vector<Sentence> sentences;
  std::unordered_set<int64_t> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsBlank(line)) continue;
    const std::string where = "line " + std::to_string(line_no);
    Sentence s;
    try {
      Json j = Json::parse(line);
      s = SentenceFromJson(j);
    } catch (const Json::exception &e) {
      throw Error(ErrorCode::kValidation, where + ": malformed line: " + e.what());
    } catch (const Error &e) {
      throw Error(ErrorCode::kValidation, where + ": " + e.what());
    }
    auto problems = ValidateSentence(s);
    if (!problems.empty()) {
      throw Error(ErrorCode::kValidation, where + ": " + problems.front());
    }
    if (!seen.insert(s.source_id).second) {
      throw Error(ErrorCode::kValidation,
                  where + ": duplicate id " + std::to_string(s.source_id));
    }
    sentences.push_back(std::move(s));
  }
  return Corpus::FromSentences(std::move(sentences));
}

Corpus LoadCorpus(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus " + path);
  return ParseCorpus(in);
}

std::string SerializeCorpus(const Corpus &corpus) {
  std::string out;
  for (const auto &s : corpus.sentences()) {
    out += SentenceToJson(s).dump();
    out += '\n';
  }
  return out;
}

void WriteCorpus(const Corpus &corpus, const std::string &path) {
  WriteFile(path, SerializeCorpus(corpus));
}

DictionarySet ParseDictionaries(std::string_view json_text) {
  std::vector<std::string> duplicates;
  std::unordered_set<std::string> keys;
  Json::parser_callback_t detect = [&](int depth, Json::parse_event_t event,
                                       Json &parsed) {
    if (event == Json::parse_event_t::key && depth == 1) {
      const auto &key = parsed.get_ref<const std::string &>();
      if (!keys.insert(key).second) duplicates.push_back(key);
    }
    return true;
  };
  Json j;
  try {
    j = Json::parse(json_text, detect);
  } catch (const Json::parse_error &e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("dictionaries: malformed JSON: ") + e.what());
  }
  if (!duplicates.empty()) {
    throw Error(ErrorCode::kAlreadyExists,
                "duplicate dictionary " + duplicates.front());
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidArgument,
                "dictionaries: expected an object of name -> [surface]");
  }
  DictionarySet set;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_array()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "dictionary " + it.key() + " must be an array");
    }
    std::vector<std::string> entries;
    for (const Json &e : it.value()) {
      if (!e.is_string()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "dictionary " + it.key() + " has a non-string entry");
      }
      entries.push_back(e.get<std::string>());
    }
    set.Add(it.key(), entries);
  }
  return set;
}

DictionarySet LoadDictionaries(const std::string &path) {
  return ParseDictionaries(ReadFile(path));
}

std::string SerializeDictionaries(const DictionarySet &dictionaries) {
  Json j = Json::object();
  for (const auto &[name, dict] : dictionaries.all()) {
    j[name] = Json(std::vector<std::string>(dict.entries.begin(),
                                            dict.entries.end()));
  }
  return internal::DumpFile(j);
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string &path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

}  // namespace rulewise
