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

#ifndef RULEWISE_RNG_H_
#define RULEWISE_RNG_H_

#include <cstdint>
#include <span>
#include <utility>

namespace rulewise {

// xoshiro256** (Blackman & Vigna, 2018) seeded by running SplitMix64 four
// times from the user seed. Every random draw in the library goes through
// this generator so that fixtures are reproducible across platforms; the
// <random> distributions are implementation-defined and are never used.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t Next();

  // Uniform integer in [0, bound). bound must be > 0. Uses rejection on the
  // low residue so the result is exactly uniform.
  uint64_t Below(uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform();

  bool Bernoulli(double p) { return Uniform() < p; }

  // Partial Fisher-Yates: the first k entries of items become a uniform
  // sample without replacement.
  template <typename T>
  void ShufflePrefix(std::span<T> items, size_t k) {
    if (k > items.size()) k = items.size();
    for (size_t i = 0; i < k; ++i) {
      size_t j = i + Below(items.size() - i);
      std::swap(items[i], items[j]);
    }
  }

 private:
  uint64_t state_[4];
};

// One SplitMix64 step; exposed for deriving sub-seeds.
uint64_t SplitMix64(uint64_t &state);

}  // namespace rulewise

#endif  // RULEWISE_RNG_H_
