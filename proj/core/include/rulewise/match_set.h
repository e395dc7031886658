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

#ifndef RULEWISE_MATCH_SET_H_
#define RULEWISE_MATCH_SET_H_

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace rulewise {

// Fixed-length bitset over sentence ids. Bit s is set when sentence s
// satisfies whatever the set stands for (a predicate, an expression, a
// rule set, the positive label).
class MatchSet {
 public:
  MatchSet() = default;
  explicit MatchSet(size_t size) : size_(size), words_((size + 63) / 64) {}

  static MatchSet All(size_t size);

  size_t size() const { return size_; }

  bool Test(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
  void Set(size_t i) { words_[i >> 6] |= uint64_t{1} << (i & 63); }
  void Reset(size_t i) { words_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }

  size_t Count() const;
  bool Empty() const;

  MatchSet &operator&=(const MatchSet &other);
  MatchSet &operator|=(const MatchSet &other);
  MatchSet &operator^=(const MatchSet &other);
  // this := this AND NOT other
  MatchSet &Subtract(const MatchSet &other);

  // |this AND other| without materializing the intersection.
  size_t IntersectCount(const MatchSet &other) const;
  bool IsSubsetOf(const MatchSet &other) const;

  friend MatchSet operator&(MatchSet a, const MatchSet &b) { return a &= b; }
  friend MatchSet operator|(MatchSet a, const MatchSet &b) { return a |= b; }
  friend MatchSet operator^(MatchSet a, const MatchSet &b) { return a ^= b; }
  friend MatchSet Difference(MatchSet a, const MatchSet &b) {
    return a.Subtract(b);
  }

  bool operator==(const MatchSet &other) const = default;

  template <typename Fn>
  void ForEach(Fn &&fn) const {
    for (size_t w = 0; w < words_.size(); ++w) {
      uint64_t bits = words_[w];
      while (bits != 0) {
        fn(w * 64 + static_cast<size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

  std::vector<int> ToIds() const;

 private:
  void CheckSameSize(const MatchSet &other) const;

  size_t size_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace rulewise

#endif  // RULEWISE_MATCH_SET_H_
