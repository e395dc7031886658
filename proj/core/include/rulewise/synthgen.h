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

#ifndef RULEWISE_SYNTHGEN_H_
#define RULEWISE_SYNTHGEN_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rulewise/corpus.h"

namespace rulewise {

struct SynthConfig {
  uint64_t rng_seed = 7;
  int n_sentences = 2000;  // train + test
  int n_planted_rules = 5;
  int min_planted_depth = 1;
  int max_planted_depth = 3;
  double label_noise = 0.05;
  // Probability that a sentence carries a second frame.
  double two_frame_rate = 0.0;
  int lemma_vocab = 40;
  int argument_vocab = 30;  // per role
  int dictionary_size = 8;
  double train_fraction = 0.8;
  // The learner support the planted rules must clear twice over in train.
  int min_support = 5;
  // Share of train sentences each planted rule may cover, and the range of
  // the noiseless positive rate of their union.
  double min_rule_coverage = 0.04;
  double max_rule_coverage = 0.12;
  double min_positive_rate = 0.30;
  double max_positive_rate = 0.45;
  int max_attempts = 200;

  void Validate() const;

  bool operator==(const SynthConfig &) const = default;
};

SynthConfig ParseSynthConfig(std::string_view json_text);
std::string SerializeSynthConfig(const SynthConfig &config);

struct SynthData {
  Corpus train;
  Corpus test;
  DictionarySet dictionaries;
  std::vector<std::string> planted_rules;  // expression text
};

// Throws kInvalidArgument on an invalid config and kFailedPrecondition when
// no qualifying planted rule set is found within max_attempts.
SynthData GenerateSynthetic(const SynthConfig &config);

}  // namespace rulewise

#endif  // RULEWISE_SYNTHGEN_H_
