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

#ifndef RULEWISE_SRC_JSON_UTIL_H_
#define RULEWISE_SRC_JSON_UTIL_H_

#include <span>
#include <string>
#include <vector>
#include <string_view>

#include "json.hpp"
#include "rulewise/error.h"
#include "rulewise/rule_engine.h"

namespace rulewise::internal {

using Json = nlohmann::json;

// Parses text, mapping syntax errors to kInvalidArgument with `what` as
// context.
Json ParseJson(std::string_view text, std::string_view what);

const Json &Field(const Json &object, std::string_view key);
const Json *OptionalField(const Json &object, std::string_view key);

std::string GetString(const Json &object, std::string_view key);
int64_t GetInt(const Json &object, std::string_view key);
double GetNumber(const Json &object, std::string_view key);

// Rejects keys outside `allowed`.
void CheckKeys(const Json &object, std::initializer_list<std::string_view> allowed,
               std::string_view what);

// Compact or 2-space dump with a trailing newline for files.
std::string DumpFile(const Json &value);

std::vector<RuleRecord> RuleRecordsFromJson(const Json &rules);
Json RuleRecordsToJson(std::span<const RuleRecord> rules);

}  // namespace rulewise::internal

#endif  // RULEWISE_SRC_JSON_UTIL_H_
