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

#include "rulewise/service/server.h"

#include "httplib.h"
#include "rulewise/error.h"

namespace rulewise::service {

struct HttpServer::Impl {
  Impl(WorkbenchApi &a, ServerOptions o) : api(a), options(std::move(o)) {}

  WorkbenchApi &api;
  ServerOptions options;
  httplib::Server server;
  int port = -1;

  void SetCors(httplib::Response &res) const {
    res.set_header("Access-Control-Allow-Origin", options.cors_origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  }

  void Forward(const httplib::Request &req, httplib::Response &res) {
    ApiRequest request;
    request.method = req.method;
    request.path = req.path;
    for (const auto &[k, v] : req.params) request.query.emplace(k, v);
    request.body = req.body;
    ApiResponse response = api.Handle(request);
    res.status = response.status;
    SetCors(res);
    res.set_content(response.body, "application/json");
  }
};

HttpServer::HttpServer(WorkbenchApi &api, ServerOptions options)
    : impl_(std::make_unique<Impl>(api, std::move(options))) {
  Impl *impl = impl_.get();
  auto forward = [impl](const httplib::Request &req, httplib::Response &res) {
    impl->Forward(req, res);
  };
  impl->server.Get(".*", forward);
  impl->server.Post(".*", forward);
  impl->server.Put(".*", forward);
  impl->server.Delete(".*", forward);
  impl->server.Options(".*", [impl](const httplib::Request &, httplib::Response &res) {
    impl->SetCors(res);
    res.status = 204;
  });
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind() {
  const auto &o = impl_->options;
  if (o.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(o.host);
  } else {
    impl_->port = impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
  }
  if (impl_->port < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  return impl_->port;
}

void HttpServer::Serve() { impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

}  // namespace rulewise::service
