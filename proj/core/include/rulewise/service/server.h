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

#ifndef RULEWISE_SERVICE_SERVER_H_
#define RULEWISE_SERVICE_SERVER_H_

#include <memory>
#include <string>

#include "rulewise/service/api.h"

namespace rulewise::service {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string cors_origin = "*";
};

// Serves a WorkbenchApi over HTTP. The api must outlive the server.
class HttpServer {
 public:
  HttpServer(WorkbenchApi &api, ServerOptions options = {});
  ~HttpServer();

  HttpServer(const HttpServer &) = delete;
  HttpServer &operator=(const HttpServer &) = delete;

  // Returns the bound port. Throws kIo when binding fails.
  int Bind();
  // Blocks until Stop(). Call Bind() first.
  void Serve();
  void Stop();
  void WaitUntilReady() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rulewise::service

#endif  // RULEWISE_SERVICE_SERVER_H_
