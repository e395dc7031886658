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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json_util.h"
#include "rulewise/error.h"
#include "rulewise/learner.h"
#include "rulewise/service/api.h"
#include "rulewise/service/server.h"
#include "rulewise/service/store.h"
#include "rulewise/session.h"
#include "rulewise/synthgen.h"

namespace rulewise::service {

using internal::Json;

namespace {

struct Flags {
  std::string corpus;
  std::string dicts;
  std::string model;
  std::string rules;
  std::string session;
  std::string config;
  std::string out;
  std::string out_dir;
  std::string host = "127.0.0.1";
  std::string session_dir = ".";
  std::string cors_origin = "*";
  std::optional<uint64_t> seed;
  int port = 8080;
  int k_max = 8;
  bool json = false;
};

std::string Fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

Json MetricsJson(const Metrics &m) {
  return Json{{"tp", m.tp},         {"fp", m.fp},
              {"fn", m.fn},         {"precision", m.precision},
              {"recall", m.recall}, {"f1", m.f1}};
}

void PrintMetricsRow(std::ostream &out, const std::string &label, const Metrics &m,
                     const std::string &expression) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-9s %6d %6d %6d %9s %7s %6s  ", label.c_str(),
                m.tp, m.fp, m.fn, Fixed(m.precision).c_str(),
                Fixed(m.recall).c_str(), Fixed(m.f1).c_str());
  out << buf << expression << "\n";
}

void PrintMetricsHeader(std::ostream &out) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-9s %6s %6s %6s %9s %7s %6s  ", "rule", "tp",
                "fp", "fn", "precision", "recall", "f1");
  out << buf << "expression\n";
}

LearnerConfig LearnerConfigFrom(const Flags &f) {
  LearnerConfig config;
  if (!f.config.empty()) config = ParseLearnerConfig(ReadFile(f.config));
  if (f.seed) config.rng_seed = *f.seed;
  config.Validate();
  return config;
}

int Ingest(const Flags &f, std::ostream &out) {
  CatalogConfig catalog_config;
  catalog_config.min_support = LearnerConfigFrom(f).min_support;
  auto ws = LoadWorkspace(f.corpus, f.dicts, catalog_config);
  const ValidationReport report = ValidateCorpus(ws->corpus());
  Json j{{"sentences", ws->corpus().size()},
         {"positives", ws->corpus().positives()},
         {"negatives", ws->corpus().negatives()},
         {"dictionaries", ws->dictionaries().size()},
         {"predicates", ws->catalog().size()},
         {"corpus_fingerprint", ws->fingerprint()},
         {"violations", report.violations.size()}};
  if (f.json) {
    out << j.dump(2) << "\n";
  } else {
    out << "sentences    " << ws->corpus().size() << "\n"
        << "positives    " << ws->corpus().positives() << "\n"
        << "negatives    " << ws->corpus().negatives() << "\n"
        << "dictionaries " << ws->dictionaries().size() << "\n"
        << "predicates   " << ws->catalog().size() << "\n"
        << "fingerprint  " << ws->fingerprint() << "\n";
    for (const auto &v : report.violations) {
      out << "sentence " << v.sentence_id << ": " << v.message << "\n";
    }
  }
  return report.ok() ? kExitOk : kExitFailure;
}

int Learn(const Flags &f, std::ostream &out) {
  const LearnerConfig config = LearnerConfigFrom(f);
  CatalogConfig catalog_config;
  catalog_config.min_support = config.min_support;
  auto ws = LoadWorkspace(f.corpus, f.dicts, catalog_config);
  const auto candidates = GenerateCandidates(ws->index(), config);
  const WeightedRuleModel model = TrainWeights(candidates, ws->index(), config);
  const ModelFile file = ToModelFile(model, ws->catalog());
  WriteFile(f.out, SerializeModelFile(file));
  const double first = model.loss_history.empty() ? 0.0 : model.loss_history.front();
  const double last = model.loss_history.empty() ? 0.0 : model.loss_history.back();
  if (f.json) {
    out << Json{{"candidates", candidates.size()},
                {"rules", model.rules.size()},
                {"bias", model.bias},
                {"initial_loss", first},
                {"final_loss", last},
                {"model_fingerprint", ModelFingerprint(model, ws->catalog())},
                {"out", f.out}}
               .dump(2)
        << "\n";
  } else {
    out << "candidates " << candidates.size() << "\n"
        << "rules      " << model.rules.size() << "\n"
        << "loss       " << Fixed(first, 6) << " -> " << Fixed(last, 6) << "\n"
        << "wrote      " << f.out << "\n";
  }
  return kExitOk;
}

int Eval(const Flags &f, std::ostream &out) {
  const std::vector<RuleRecord> records = ParseRuleFile(ReadFile(f.rules));
  const std::vector<PredicateKey> extra = ReferencedPredicates(records);
  auto ws = LoadWorkspace(f.corpus, f.dicts, CatalogConfig{}, extra);
  const RuleSet rules = ResolveRuleSet(records, ws->catalog());
  const Metrics combined =
      ComputeMetrics(EvalRuleSet(rules, ws->index()), ws->index());
  const auto scored = ScoreRules(rules.expressions(), ws->index());
  if (f.json) {
    Json list = Json::array();
    for (const auto &r : scored) {
      list.push_back(Json{{"id", r.expression.id()},
                          {"expression", RenderExpression(r.expression, ws->catalog())},
                          {"metrics", MetricsJson(r.metrics)}});
    }
    out << Json{{"corpus_fingerprint", ws->fingerprint()},
                {"rules", std::move(list)},
                {"combined", MetricsJson(combined)}}
               .dump(2)
        << "\n";
  } else {
    PrintMetricsHeader(out);
    for (const auto &r : scored) {
      PrintMetricsRow(out, std::to_string(r.expression.id()), r.metrics,
                      RenderExpression(r.expression, ws->catalog()));
    }
    PrintMetricsRow(out, "combined", combined, "");
  }
  return kExitOk;
}

int TopK(const Flags &f, std::ostream &out) {
  const Project project = LoadProject(f.corpus, f.dicts, f.model);
  const auto &ws = *project.workspace;
  const SelectionResult result = TopKSelect(*project.model, ws.index(), f.k_max);
  std::vector<RuleRecord> chosen;
  for (const auto &e : result.chosen.expressions()) {
    std::optional<double> weight;
    for (const auto &r : project.model->rules) {
      if (r.expression.id() == e.id()) weight = r.weight;
    }
    chosen.push_back({e.id(), RenderExpression(e, ws.catalog()), weight});
  }
  if (!f.out.empty()) WriteFile(f.out, SerializeRuleFile(chosen));
  if (f.json) {
    Json trace = Json::array();
    for (const auto &s : result.selection_trace) {
      trace.push_back(Json{{"id", s.id}, {"f1_gain", s.f1_gain}, {"f1", s.f1}});
    }
    out << Json{{"k", result.k},
                {"train_metrics", MetricsJson(result.train_metrics)},
                {"chosen", Json::parse(SerializeRuleFile(chosen))["rules"]},
                {"selection_trace", std::move(trace)}}
               .dump(2)
        << "\n";
  } else {
    out << "k " << result.k << "\n";
    PrintMetricsHeader(out);
    for (const auto &r : chosen) {
      const auto &e = *std::find_if(
          result.chosen.expressions().begin(), result.chosen.expressions().end(),
          [&](const LinguisticExpression &x) { return x.id() == r.id; });
      PrintMetricsRow(out, std::to_string(r.id),
                      ComputeMetrics(EvalExpression(e, ws.index()), ws.index()),
                      r.expression);
    }
    PrintMetricsRow(out, "combined", result.train_metrics, "");
  }
  return kExitOk;
}

int Serve(const Flags &f, std::ostream &out) {
  ApiOptions options;
  options.session_dir = f.session_dir;
  WorkbenchApi api(LoadProject(f.corpus, f.dicts, f.model), options);
  ServerOptions server_options;
  server_options.host = f.host;
  server_options.port = f.port;
  server_options.cors_origin = f.cors_origin;
  HttpServer server(api, server_options);
  const int port = server.Bind();
  out << "listening on http://" << f.host << ":" << port << "\n" << std::flush;
  server.Serve();
  return kExitOk;
}

int Export(const Flags &f, std::ostream &out) {
  const Project project = LoadProject(f.corpus, f.dicts, f.model);
  const Session session = Session::Load(f.session, project.workspace, project.model);
  const std::string text = SerializeRuleFile(session.ExportRuleSet());
  if (f.out.empty()) {
    out << text;
  } else {
    WriteFile(f.out, text);
    if (!f.json) out << "wrote " << session.approved().size() << " rules to " << f.out << "\n";
  }
  return kExitOk;
}

int Synth(const Flags &f, std::ostream &out) {
  SynthConfig config;
  if (!f.config.empty()) config = ParseSynthConfig(ReadFile(f.config));
  if (f.seed) config.rng_seed = *f.seed;
  const SynthData data = GenerateSynthetic(config);
  std::error_code ec;
  std::filesystem::create_directories(f.out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + f.out_dir + ": " + ec.message());
  const std::filesystem::path dir(f.out_dir);
  WriteCorpus(data.train, (dir / "train.jsonl").string());
  WriteCorpus(data.test, (dir / "test.jsonl").string());
  WriteFile((dir / "dicts.json").string(), SerializeDictionaries(data.dictionaries));
  std::vector<RuleRecord> planted;
  for (size_t i = 0; i < data.planted_rules.size(); ++i) {
    planted.push_back({static_cast<ExpressionId>(i), data.planted_rules[i], std::nullopt});
  }
  WriteFile((dir / "planted.json").string(), SerializeRuleFile(planted));
  if (f.json) {
    out << Json{{"train", data.train.size()},
                {"train_positives", data.train.positives()},
                {"test", data.test.size()},
                {"test_positives", data.test.positives()},
                {"planted_rules", data.planted_rules},
                {"out_dir", f.out_dir}}
               .dump(2)
        << "\n";
  } else {
    out << "train " << data.train.size() << " (" << data.train.positives()
        << " positive)\n"
        << "test  " << data.test.size() << " (" << data.test.positives()
        << " positive)\n";
    for (const auto &r : data.planted_rules) out << "planted " << r << "\n";
    out << "wrote " << f.out_dir << "\n";
  }
  return kExitOk;
}

int Replay(const Flags &f, std::ostream &out) {
  const Project project = LoadProject(f.corpus, f.dicts, f.model);
  // Load replays the event log and checks it against the stored sets.
  const Session session = Session::Load(f.session, project.workspace, project.model);
  if (!f.out.empty()) session.Save(f.out);
  const Metrics &m = session.combined_metrics();
  if (f.json) {
    out << Json{{"session_id", session.session_id()},
                {"events", session.events().size()},
                {"approved", session.approved()},
                {"disapproved", session.disapproved()},
                {"custom_count", session.custom_expressions().size()},
                {"metrics", MetricsJson(m)}}
               .dump(2)
        << "\n";
  } else {
    out << "session  " << session.session_id() << "\n"
        << "events   " << session.events().size() << "\n"
        << "approved " << session.approved().size() << "\n"
        << "custom   " << session.custom_expressions().size() << "\n";
    PrintMetricsHeader(out);
    PrintMetricsRow(out, "combined", m, "");
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"Rule workbench: learn, evaluate and curate linguistic rules",
               "rulewise"};
  app.require_subcommand(1);
  Flags f;

  auto add_data = [&](CLI::App *cmd) {
    cmd->add_option("--corpus", f.corpus, "Corpus JSONL file")->required();
    cmd->add_option("--dicts", f.dicts, "Dictionaries JSON file");
  };
  auto add_json = [&](CLI::App *cmd) {
    cmd->add_flag("--json", f.json, "Machine-readable output");
  };
  auto add_seed = [&](CLI::App *cmd) {
    cmd->add_option("--seed", f.seed, "RNG seed (overrides the config)");
  };

  auto *ingest = app.add_subcommand("ingest", "Validate and fingerprint a corpus");
  add_data(ingest);
  ingest->add_option("--config", f.config, "Learner config JSON (min_support)");
  add_json(ingest);

  auto *learn = app.add_subcommand("learn", "Generate candidates and fit weights");
  add_data(learn);
  learn->add_option("--config", f.config, "Learner config JSON");
  learn->add_option("--out", f.out, "Model file to write")->required();
  add_seed(learn);
  add_json(learn);

  auto *eval = app.add_subcommand("eval", "Evaluate a rule-set file");
  add_data(eval);
  eval->add_option("--rules", f.rules, "Rule-set JSON file")->required();
  add_json(eval);

  auto *topk = app.add_subcommand("topk", "Greedy top-K selection from a model");
  add_data(topk);
  topk->add_option("--model", f.model, "Model file")->required();
  topk->add_option("--k-max", f.k_max, "Largest K to consider")->capture_default_str();
  topk->add_option("--out", f.out, "Write the chosen rules as a rule-set file");
  add_json(topk);

  auto *serve = app.add_subcommand("serve", "Start the HTTP API");
  add_data(serve);
  serve->add_option("--model", f.model, "Model file")->required();
  serve->add_option("--port", f.port, "Port (0 picks a free one)")->capture_default_str();
  serve->add_option("--host", f.host, "Bind address")->capture_default_str();
  serve->add_option("--session-dir", f.session_dir, "Directory for saved sessions")
      ->capture_default_str();
  serve->add_option("--cors-origin", f.cors_origin, "Allowed CORS origin")
      ->capture_default_str();

  auto *exp = app.add_subcommand("export", "Write a session's approved rules");
  add_data(exp);
  exp->add_option("--model", f.model, "Model file")->required();
  exp->add_option("--session", f.session, "Session file")->required();
  exp->add_option("--out", f.out, "Rule-set file (stdout when omitted)");
  add_json(exp);

  auto *synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->add_option("--config", f.config, "Synth config JSON");
  synth->add_option("--out-dir", f.out_dir, "Output directory")->required();
  add_seed(synth);
  add_json(synth);

  auto *replay = app.add_subcommand("replay", "Rebuild a session from its event log");
  add_data(replay);
  replay->add_option("--model", f.model, "Model file")->required();
  replay->add_option("--session", f.session, "Session file")->required();
  replay->add_option("--out", f.out, "Write the rebuilt session");
  add_json(replay);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("rulewise");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char *> argv;
  for (const auto &a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (ingest->parsed()) return Ingest(f, out);
    if (learn->parsed()) return Learn(f, out);
    if (eval->parsed()) return Eval(f, out);
    if (topk->parsed()) return TopK(f, out);
    if (serve->parsed()) return Serve(f, out);
    if (exp->parsed()) return Export(f, out);
    if (synth->parsed()) return Synth(f, out);
    if (replay->parsed()) return Replay(f, out);
  } catch (const Error &e) {
    err << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace rulewise::service
