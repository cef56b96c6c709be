/**
 * Copyright 2026 The CohortKit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cohort/api.hpp"
#include "cohort/error.hpp"
#include "cohort/graph.hpp"
#include "cohort/session.hpp"
#include "cohort/synthetic.hpp"
#include "httplib.h"

namespace {

using cohort::Json;
using cohort::OrderedJson;

struct CorpusOptions {
  std::string corpus;
  std::string schema;
  std::string templates;
  std::string aliases;
  std::uint64_t seed = 0;
  int walks = 8;
};

void AddCorpusOptions(CLI::App *cmd, CorpusOptions &o, bool need_templates) {
  cmd->add_option("--corpus", o.corpus, "JSON-Lines records")->required()->envname("COHORT_CORPUS");
  cmd->add_option("--schema", o.schema, "schema mapping document")->required()->envname("COHORT_SCHEMA");
  auto *t = cmd->add_option("--templates", o.templates, "meta-path template document")->envname("COHORT_TEMPLATES");
  if (need_templates) t->required();
  cmd->add_option("--aliases", o.aliases, "figure alias table")->envname("COHORT_ALIASES");
  cmd->add_option("--seed", o.seed, "walk and default analysis seed")->envname("COHORT_SEED");
  cmd->add_option("--walks", o.walks, "walks per figure and template")->envname("COHORT_WALKS");
}

cohort::LoadedCorpus Load(const CorpusOptions &o) {
  cohort::WalkConfig walk;
  walk.walks_per_figure_per_template = o.walks;
  return cohort::LoadCorpus({o.corpus, o.schema, o.templates, o.aliases}, walk, o.seed);
}

Json ReadJsonArg(const std::string &arg) {
  if (!arg.empty() && (arg[0] == '{' || arg[0] == '[')) return Json::parse(arg);
  std::ifstream in(arg);
  if (!in) throw cohort::Error(cohort::ErrorCode::kIo, "cannot open " + arg);
  return Json::parse(in);
}

int RunIngest(const CorpusOptions &o, const std::string &rejects_path) {
  std::ifstream schema_in(o.schema);
  if (!schema_in) throw cohort::Error(cohort::ErrorCode::kIo, "cannot open " + o.schema);
  const auto schema = cohort::SchemaMapping::FromJson(Json::parse(schema_in));
  std::ifstream in(o.corpus);
  if (!in) throw cohort::Error(cohort::ErrorCode::kIo, "cannot open " + o.corpus);
  const auto records = cohort::ReadRecords(in);
  const auto result = cohort::IngestGraph(schema, records);
  OrderedJson nodes_by_type;
  OrderedJson edges_by_type;
  for (const auto &t : result.graph.types().node_types()) nodes_by_type[t.name] = 0;
  for (const auto &t : result.graph.types().edge_types()) edges_by_type[t.name] = 0;
  for (const auto &n : result.graph.nodes()) {
    nodes_by_type[result.graph.types().node_type(n.type).name] = nodes_by_type[result.graph.types().node_type(n.type).name].get<int>() + 1;
  }
  for (const auto &e : result.graph.edges()) {
    const auto &name = result.graph.types().edge_type(e.type).name;
    edges_by_type[name] = edges_by_type[name].get<int>() + 1;
  }
  OrderedJson summary{{"nodes", result.graph.node_count()},
                      {"edges", result.graph.edge_count()},
                      {"nodes_by_type", nodes_by_type},
                      {"edges_by_type", edges_by_type},
                      {"rejects", result.rejects.size()},
                      {"warnings", result.warnings}};
  std::cout << summary.dump(2) << "\n";
  if (!rejects_path.empty()) {
    std::ofstream out(rejects_path);
    cohort::WriteRejects(out, result.rejects);
  }
  return 0;
}

int RunIdentify(const CorpusOptions &o, const std::string &scope_arg, const std::string &config_arg,
                const std::string &out_path, const std::string &iteration_path) {
  const auto loaded = Load(o);
  const auto query = cohort::ScopeQuery::FromJson(ReadJsonArg(scope_arg));
  const auto scope = cohort::ResolveScope(loaded.corpus, query);
  Json config_json = config_arg.empty() ? Json::object() : ReadJsonArg(config_arg);
  if (!config_json.contains("seed")) config_json["seed"] = o.seed;
  const auto config = cohort::IdentifyConfig::FromJson(config_json);
  cohort::Session session("headless", loaded.corpus);
  const auto &it = session.Identify(scope, config);
  const std::string csv = session.ExportCsv(it.index);
  if (out_path.empty() || out_path == "-") {
    std::cout << csv;
  } else {
    std::ofstream(out_path, std::ios::binary) << csv;
  }
  if (!iteration_path.empty()) std::ofstream(iteration_path, std::ios::binary) << it.ToJson().dump(2) << "\n";
  std::cerr << "scope " << scope.size() << " figures, included " << it.summary.included << ", candidates "
            << it.summary.candidates << "\n";
  return 0;
}

int RunBench(std::size_t seeds, std::uint64_t first_seed, std::size_t positives, bool json) {
  std::size_t passed = 0;
  OrderedJson rows = OrderedJson::array();
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < seeds; ++i) {
    const auto trial = cohort::RunPlantedTrial({}, first_seed + i, positives);
    const bool ok = trial.precision >= 0.8 && trial.recall >= 0.8;
    passed += ok;
    rows.push_back(OrderedJson{{"seed", trial.seed},
                               {"included", trial.included},
                               {"precision", trial.precision},
                               {"recall", trial.recall},
                               {"pass", ok},
                               {"concept", trial.concept_features}});
    if (!json) {
      std::printf("seed %llu  included %3zu  precision %.3f  recall %.3f  %s\n",
                  static_cast<unsigned long long>(trial.seed), trial.included, trial.precision, trial.recall,
                  ok ? "pass" : "FAIL");
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (json) {
    std::cout << OrderedJson{{"trials", rows}, {"passed", passed}, {"seconds", secs}}.dump(2) << "\n";
  } else {
    std::printf("%zu/%zu seeds reach precision and recall >= 0.8 (%.2f s)\n", passed, seeds, secs);
  }
  return passed * 10 >= seeds * 8 ? 0 : 1;
}

int RunServe(const CorpusOptions &o, const std::string &state, const std::string &bind) {
  const auto loaded = Load(o);
  std::cerr << "loaded " << loaded.corpus.graph.node_count() << " nodes, " << loaded.corpus.graph.edge_count()
            << " edges, " << loaded.corpus.store.size() << " descriptions";
  if (!loaded.rejects.empty()) std::cerr << ", " << loaded.rejects.size() << " rejected rows";
  std::cerr << "\n";
  cohort::Service service(loaded.corpus, {state, o.seed});
  httplib::Server server;
  service.Mount(server);
  const auto colon = bind.rfind(':');
  const std::string host = colon == std::string::npos ? bind : bind.substr(0, colon);
  const int port = colon == std::string::npos ? 8080 : std::stoi(bind.substr(colon + 1));
  std::cerr << "listening on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    std::cerr << "cannot bind " << bind << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Cohort identification over typed knowledge graphs"};
  app.require_subcommand(1);

  CorpusOptions serve_opts;
  std::string state_dir = "state";
  std::string bind = "127.0.0.1:8080";
  auto *serve = app.add_subcommand("serve", "run the HTTP/JSON API");
  AddCorpusOptions(serve, serve_opts, true);
  serve->add_option("--state", state_dir, "session log directory")->envname("COHORT_STATE");
  serve->add_option("--bind", bind, "host:port")->envname("COHORT_BIND");

  CorpusOptions ingest_opts;
  std::string rejects;
  auto *ingest = app.add_subcommand("ingest", "ingest a corpus and report counts");
  AddCorpusOptions(ingest, ingest_opts, false);
  ingest->add_option("--rejects", rejects, "write rejected rows as JSON-Lines");

  CorpusOptions identify_opts;
  std::string scope_arg;
  std::string config_arg;
  std::string out_path;
  std::string iteration_path;
  auto *identify = app.add_subcommand("identify", "one-shot identification, CSV export");
  AddCorpusOptions(identify, identify_opts, true);
  identify->add_option("--scope", scope_arg, "scope query (JSON text or file)")->required();
  identify->add_option("--config", config_arg, "identify config bundle (JSON text or file)");
  identify->add_option("--out", out_path, "CSV destination (default stdout)");
  identify->add_option("--iteration-json", iteration_path, "also write the iteration record");

  std::size_t seeds = 10;
  std::uint64_t first_seed = 1;
  std::size_t positives = 10;
  bool json = false;
  auto *bench = app.add_subcommand("bench", "planted-cohort recovery benchmark");
  bench->add_option("--seeds", seeds, "number of seeds");
  bench->add_option("--first-seed", first_seed, "first seed");
  bench->add_option("--positives", positives, "planted figures given as positives");
  bench->add_flag("--json", json, "machine-readable output");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*serve) return RunServe(serve_opts, state_dir, bind);
    if (*ingest) return RunIngest(ingest_opts, rejects);
    if (*identify) return RunIdentify(identify_opts, scope_arg, config_arg, out_path, iteration_path);
    if (*bench) return RunBench(seeds, first_seed, positives, json);
  } catch (const cohort::Error &e) {
    std::cerr << "error [" << cohort::ErrorCodeName(e.code()) << (e.stage() ? "@" + *e.stage() : "")
              << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
