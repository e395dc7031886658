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

#include "json_util.h"

#include <algorithm>

namespace rulewise::internal {

Json ParseJson(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error &e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": malformed JSON: " + e.what());
  }
}

const Json &Field(const Json &object, std::string_view key) {
  if (!object.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "expected a JSON object");
  }
  auto it = object.find(key);
  if (it == object.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "missing field \"" + std::string(key) + "\"");
  }
  return *it;
}

const Json *OptionalField(const Json &object, std::string_view key) {
  if (!object.is_object()) return nullptr;
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string GetString(const Json &object, std::string_view key) {
  const Json &v = Field(object, key);
  if (!v.is_string()) {
    throw Error(ErrorCode::kInvalidArgument,
                "field \"" + std::string(key) + "\" must be a string");
  }
  return v.get<std::string>();
}

int64_t GetInt(const Json &object, std::string_view key) {
  const Json &v = Field(object, key);
  if (!v.is_number_integer()) {
    throw Error(ErrorCode::kInvalidArgument,
                "field \"" + std::string(key) + "\" must be an integer");
  }
  return v.get<int64_t>();
}

double GetNumber(const Json &object, std::string_view key) {
  const Json &v = Field(object, key);
  if (!v.is_number()) {
    throw Error(ErrorCode::kInvalidArgument,
                "field \"" + std::string(key) + "\" must be a number");
  }
  return v.get<double>();
}

void CheckKeys(const Json &object, std::initializer_list<std::string_view> allowed,
               std::string_view what) {
  for (auto it = object.begin(); it != object.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + ": unknown key \"" + it.key() + "\"");
    }
  }
}

std::string DumpFile(const Json &value) { return value.dump(2) + "\n"; }

}  // namespace rulewise::internal
