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

#include "rulewise/match_set.h"

#include <string>

#include "rulewise/error.h"

namespace rulewise {

MatchSet MatchSet::All(size_t size) {
  MatchSet set(size);
  for (auto &w : set.words_) w = ~uint64_t{0};
  if (size % 64 != 0 && !set.words_.empty()) {
    set.words_.back() = (uint64_t{1} << (size % 64)) - 1;
  }
  return set;
}

size_t MatchSet::Count() const {
  size_t n = 0;
  for (uint64_t w : words_) n += static_cast<size_t>(std::popcount(w));
  return n;
}

bool MatchSet::Empty() const {
  for (uint64_t w : words_) {
    if (w != 0) return false;
  }
  return true;
}

void MatchSet::CheckSameSize(const MatchSet &other) const {
  if (size_ != other.size_) {
    throw Error(ErrorCode::kInvalidArgument,
                "match set size mismatch: " + std::to_string(size_) + " vs " +
                    std::to_string(other.size_));
  }
}

MatchSet &MatchSet::operator&=(const MatchSet &other) {
  CheckSameSize(other);
  for (size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

MatchSet &MatchSet::operator|=(const MatchSet &other) {
  CheckSameSize(other);
  for (size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

MatchSet &MatchSet::operator^=(const MatchSet &other) {
  CheckSameSize(other);
  for (size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

MatchSet &MatchSet::Subtract(const MatchSet &other) {
  CheckSameSize(other);
  for (size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

size_t MatchSet::IntersectCount(const MatchSet &other) const {
  CheckSameSize(other);
  size_t n = 0;
  for (size_t i = 0; i < words_.size(); ++i) {
    n += static_cast<size_t>(std::popcount(words_[i] & other.words_[i]));
  }
  return n;
}

bool MatchSet::IsSubsetOf(const MatchSet &other) const {
  CheckSameSize(other);
  for (size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  }
  return true;
}

std::vector<int> MatchSet::ToIds() const {
  std::vector<int> ids;
  ids.reserve(Count());
  ForEach([&](size_t i) { ids.push_back(static_cast<int>(i)); });
  return ids;
}

}  // namespace rulewise
