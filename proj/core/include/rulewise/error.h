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

#ifndef RULEWISE_ERROR_H_
#define RULEWISE_ERROR_H_

#include <stdexcept>
#include <string>

namespace rulewise {

enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  kAlreadyExists,
  kFailedPrecondition,
  kValidation,
  kIo,
};

// Stable machine-readable name, e.g. "not_found".
const char *ErrorCodeName(ErrorCode code);

// The single exception type thrown by the library. The code decides how
// front ends report it (exit status, HTTP status).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rulewise

#endif  // RULEWISE_ERROR_H_
