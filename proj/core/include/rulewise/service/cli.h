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

#ifndef RULEWISE_SERVICE_CLI_H_
#define RULEWISE_SERVICE_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace rulewise::service {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Runs one `rulewise` subcommand: ingest, learn, eval, topk, serve, export,
// synth or replay. `args` excludes the program name. Errors go to `err`.
int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err);

}  // namespace rulewise::service

#endif  // RULEWISE_SERVICE_CLI_H_
