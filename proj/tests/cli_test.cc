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

#include "rulewise/service/cli.h"

#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "rulewise/service/store.h"
#include "rulewise/session.h"
#include "test_util.h"

namespace rulewise::service {
namespace {

using Json = nlohmann::json;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new std::string(rulewise::testing::ScratchDir("cli").string());
    const std::string config = *dir_ + "/synth.json";
    WriteFile(config, "{\"n_sentences\": 800, \"rng_seed\": 3, \"label_noise\": 0.0}");
    CliRun r = Cli({"synth", "--config", config, "--out-dir", *dir_});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string learner = *dir_ + "/learner.json";
    WriteFile(learner, "{\"epochs\": 40, \"learning_rate\": 0.5}");
    r = Cli({"learn", "--corpus", Path("train.jsonl"), "--dicts", Path("dicts.json"),
             "--config", learner, "--out", Path("model.json")});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() { delete dir_; }
  static std::string Path(const std::string &name) { return *dir_ + "/" + name; }
  static std::vector<std::string> Data(std::vector<std::string> args,
                                       const std::string &corpus = "train.jsonl") {
    args.insert(args.end(), {"--corpus", Path(corpus), "--dicts", Path("dicts.json")});
    return args;
  }
  static std::string *dir_;
};

std::string *CliTest::dir_ = nullptr;

TEST_F(CliTest, SynthWritesAllArtifacts) {
  for (const char *f : {"train.jsonl", "test.jsonl", "dicts.json", "planted.json"}) {
    EXPECT_TRUE(std::filesystem::exists(Path(f))) << f;
  }
  EXPECT_EQ(LoadCorpus(Path("train.jsonl")).size(), 640u);
  EXPECT_EQ(LoadCorpus(Path("test.jsonl")).size(), 160u);
  EXPECT_EQ(ParseRuleFile(ReadFile(Path("planted.json"))).size(), 5u);
  // Same seed, same bytes.
  const std::string other = Path("again");
  ASSERT_EQ(Cli({"synth", "--config", Path("synth.json"), "--out-dir", other}).code, 0);
  EXPECT_EQ(ReadFile(other + "/train.jsonl"), ReadFile(Path("train.jsonl")));
  EXPECT_EQ(ReadFile(other + "/planted.json"), ReadFile(Path("planted.json")));
}

TEST_F(CliTest, IngestReportsCorpus) {
  CliRun r = Cli(Data({"ingest", "--json"}));
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["sentences"], 640);
  auto ws = LoadWorkspace(Path("train.jsonl"), Path("dicts.json"), CatalogConfig{});
  EXPECT_EQ(j["corpus_fingerprint"], ws->fingerprint());
  CliRun text = Cli(Data({"ingest"}));
  EXPECT_NE(text.out.find("sentences    640"), std::string::npos);
}

TEST_F(CliTest, NoiselessPlantedRulesScorePerfectly) {
  for (const char *split : {"train.jsonl", "test.jsonl"}) {
    CliRun r = Cli(Data({"eval", "--rules", Path("planted.json")}, split));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto pos = r.out.find("combined");
    ASSERT_NE(pos, std::string::npos);
    const std::string row = r.out.substr(pos);
    EXPECT_NE(row.find("1.000   1.000  1.000"), std::string::npos) << row;
    CliRun j = Cli(Data({"eval", "--json", "--rules", Path("planted.json")}, split));
    Json body = Json::parse(j.out);
    EXPECT_EQ(body["combined"]["f1"], 1.0);
    EXPECT_EQ(body["combined"]["fp"], 0);
    EXPECT_EQ(body["rules"].size(), 5u);
  }
}

TEST_F(CliTest, LearnIsByteDeterministic) {
  CliRun r = Cli(Data({"learn", "--config", Path("learner.json"), "--out", Path("model2.json")}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(ReadFile(Path("model.json")), ReadFile(Path("model2.json")));
  CliRun j = Cli(Data({"learn", "--json", "--config", Path("learner.json"), "--seed", "9",
                    "--out", Path("model3.json")}));
  ASSERT_EQ(j.code, 0);
  EXPECT_EQ(ParseModelFile(ReadFile(Path("model3.json"))).config.rng_seed, 9u);
  EXPECT_TRUE(Json::parse(j.out).contains("rules"));
}

TEST_F(CliTest, TopKWritesRuleFile) {
  CliRun r = Cli(Data({"topk", "--json", "--model", Path("model.json"), "--k-max", "4",
                    "--out", Path("top.json")}));
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_LE(j["k"].get<int>(), 4);
  const auto chosen = ParseRuleFile(ReadFile(Path("top.json")));
  EXPECT_EQ(chosen.size(), j["k"].get<size_t>());
  CliRun eval = Cli(Data({"eval", "--json", "--rules", Path("top.json")}));
  EXPECT_EQ(Json::parse(eval.out)["combined"], j["train_metrics"]);
}

TEST_F(CliTest, ExportAndReplaySession) {
  const Project project =
      LoadProject(Path("train.jsonl"), Path("dicts.json"), Path("model.json"));
  Session s("cli", project.workspace, project.model);
  for (size_t i = 0; i < 3; ++i) s.Approve(project.model->rules.at(i).expression.id());
  s.Disapprove(project.model->rules.at(3).expression.id());
  s.Save(Path("cli.session.json"));

  CliRun exp = Cli(Data({"export", "--model", Path("model.json"), "--session",
                      Path("cli.session.json"), "--out", Path("export.json")}));
  ASSERT_EQ(exp.code, 0) << exp.err;
  const auto records = ParseRuleFile(ReadFile(Path("export.json")));
  ASSERT_EQ(records.size(), 3u);
  CliRun to_stdout = Cli(Data({"export", "--model", Path("model.json"), "--session",
                            Path("cli.session.json")}));
  EXPECT_EQ(to_stdout.out, ReadFile(Path("export.json")));

  CliRun eval = Cli(Data({"eval", "--json", "--rules", Path("export.json")}));
  Json c = Json::parse(eval.out)["combined"];
  EXPECT_EQ(c["tp"], s.combined_metrics().tp);
  EXPECT_EQ(c["fp"], s.combined_metrics().fp);
  EXPECT_EQ(c["fn"], s.combined_metrics().fn);
  EXPECT_EQ(c["f1"], s.combined_metrics().f1);

  CliRun replay = Cli(Data({"replay", "--json", "--model", Path("model.json"), "--session",
                         Path("cli.session.json"), "--out", Path("replayed.json")}));
  ASSERT_EQ(replay.code, 0) << replay.err;
  EXPECT_EQ(Json::parse(replay.out)["events"], 4);
  EXPECT_EQ(ReadFile(Path("replayed.json")), ReadFile(Path("cli.session.json")));

  // A session bound to another corpus is rejected.
  CliRun wrong = Cli(Data({"replay", "--model", Path("model.json"), "--session",
                        Path("cli.session.json")}, "test.jsonl"));
  EXPECT_EQ(wrong.code, kExitFailure);

  Session empty("none", project.workspace, project.model);
  empty.Save(Path("empty.session.json"));
  CliRun nothing = Cli(Data({"export", "--model", Path("model.json"), "--session",
                          Path("empty.session.json")}));
  EXPECT_EQ(nothing.code, kExitFailure);
  EXPECT_NE(nothing.err.find("failed_precondition"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Cli({}).code, kExitUsage);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Cli({"learn"}).code, kExitUsage);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
  EXPECT_EQ(Cli(Data({"topk", "--model", Path("model.json"), "--k-max", "many"})).code,
            kExitUsage);
  CliRun missing = Cli({"ingest", "--corpus", Path("absent.jsonl")});
  EXPECT_EQ(missing.code, kExitFailure);
  EXPECT_EQ(missing.err.rfind("error: io: ", 0), 0u) << missing.err;
  WriteFile(Path("bad.json"), "{\"epochs\": 0}");
  EXPECT_EQ(Cli(Data({"learn", "--config", Path("bad.json"), "--out", Path("x.json")})).code,
            kExitFailure);
}

}  // namespace
}  // namespace rulewise::service
