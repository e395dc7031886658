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

#include <gtest/gtest.h>

#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "rulewise/session.h"
#include "test_util.h"

namespace rulewise::service {
namespace {

using Json = nlohmann::json;

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const SynthData data = GenerateSynthetic(rulewise::testing::SmallSynthConfig(2, 400));
    auto ws = rulewise::testing::SynthWorkspace(data);
    LearnerConfig config;
    config.epochs = 10;
    auto model = std::make_shared<const WeightedRuleModel>(
        TrainWeights(GenerateCandidates(ws->index(), config), ws->index(), config));
    ApiOptions options;
    options.session_dir = rulewise::testing::ScratchDir("server").string();
    api_ = std::make_unique<WorkbenchApi>(
        Project{ws, model, ModelFingerprint(*model, ws->catalog())}, options);
    ServerOptions server_options;
    server_options.port = 0;
    server_options.cors_origin = "http://localhost:5173";
    server_ = std::make_unique<HttpServer>(*api_, server_options);
    port_ = server_->Bind();
    thread_ = std::thread([this] { server_->Serve(); });
    server_->WaitUntilReady();
  }
  void TearDown() override {
    server_->Stop();
    thread_.join();
  }

  std::unique_ptr<WorkbenchApi> api_;
  std::unique_ptr<HttpServer> server_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(ServerTest, ForwardsRequestsOverLoopback) {
  ASSERT_GT(port_, 0);
  httplib::Client client("127.0.0.1", port_);
  auto health = client.Get("/api/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(Json::parse(health->body)["status"], "ok");
  EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
  EXPECT_NE(health->get_header_value("Content-Type").find("application/json"),
            std::string::npos);

  auto created = client.Post("/api/sessions", "{\"session_id\":\"web\"}", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);

  const ExpressionId id = api_->project().model->rules.at(0).expression.id();
  auto approved = client.Post("/api/sessions/web/rules/" + std::to_string(id) + "/approve",
                              "", "application/json");
  ASSERT_TRUE(approved);
  EXPECT_EQ(approved->status, 200);

  // Query parameters, including repeated keys.
  auto rules = client.Get("/api/rules?session=web&status=approved&sort=recall");
  ASSERT_TRUE(rules);
  Json body = Json::parse(rules->body);
  ASSERT_EQ(body["rules"].size(), 1u);
  EXPECT_EQ(body["rules"][0]["id"], id);

  auto missing = client.Get("/api/sessions/nobody");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(Json::parse(missing->body)["error"]["code"], "not_found");
}

TEST_F(ServerTest, AnswersPreflight) {
  httplib::Client client("127.0.0.1", port_);
  auto res = client.Options("/api/sessions");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
  EXPECT_NE(res->get_header_value("Access-Control-Allow-Methods").find("POST"),
            std::string::npos);
}

TEST(ServerBindTest, BadAddressIsAnIoError) {
  const SynthData data = GenerateSynthetic(rulewise::testing::SmallSynthConfig(2, 400));
  auto ws = rulewise::testing::SynthWorkspace(data);
  auto model = std::make_shared<const WeightedRuleModel>();
  WorkbenchApi api(Project{ws, model, ModelFingerprint(*model, ws->catalog())});
  HttpServer server(api, ServerOptions{"256.1.1.1", 8080, "*"});
  try {
    server.Bind();
    FAIL() << "bind succeeded";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace rulewise::service
