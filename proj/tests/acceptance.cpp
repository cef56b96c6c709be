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
// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "cohort/analytics.hpp"
#include "cohort/community.hpp"
#include "cohort/error.hpp"
#include "cohort/expression.hpp"
#include "cohort/extract.hpp"
#include "cohort/fusion.hpp"
#include "cohort/random.hpp"
#include "cohort/selection.hpp"
#include "cohort/session.hpp"
#include "cohort/synthetic.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace cohort {
namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

int failures = 0;

void Run(const char *name, double limit_seconds, const std::function<Outcome()> &check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = check();
  } catch (const std::exception &e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool timed_ok = limit_seconds <= 0 || secs < limit_seconds;
  const bool pass = out.ok && timed_ok;
  if (!pass) ++failures;
  std::string limit = limit_seconds > 0 ? " < " + FormatDouble(limit_seconds) + " s" : "";
  std::printf("%s %s: %s; %.3f s%s%s\n", pass ? "PASS" : "FAIL", name, out.detail.c_str(), secs, limit.c_str(),
              timed_ok ? "" : " (too slow)");
  std::fflush(stdout);
}

std::vector<Feature> Named(std::size_t n) {
  std::vector<Feature> out;
  for (std::size_t i = 0; i < n; ++i) {
    char name[24];
    std::snprintf(name, sizeof name, "e%03zu", i);
    out.push_back(Feature::Atomic(Atom::Of(FeatureKind::kEntity, name)));
  }
  return out;
}

std::set<std::size_t> RandomSubset(std::mt19937_64 &gen, std::size_t n, double lo, double hi) {
  const double p = std::uniform_real_distribution<double>(lo, hi)(gen);
  std::set<std::size_t> s;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::uniform_real_distribution<double>(0, 1)(gen) < p) s.insert(i);
  }
  if (s.empty()) s.insert(gen() % n);
  return s;
}

Outcome PmiOracle() {
  constexpr std::size_t kUniverse = 50;
  constexpr double kTol = 1e-9;
  std::mt19937_64 gen(20260101);
  std::vector<std::set<std::size_t>> sets;
  for (int pair = 0; pair < 100; ++pair) {
    auto a = RandomSubset(gen, kUniverse, 0.02, 0.6);
    auto b = RandomSubset(gen, kUniverse, 0.02, 0.6);
    if (pair % 5 == 0) {
      // Force an empty intersection for the smoothing branch.
      for (auto x : a) b.erase(x);
      if (b.empty()) {
        for (std::size_t i = 0; i < kUniverse; ++i) {
          if (!a.count(i)) {
            b.insert(i);
            break;
          }
        }
      }
    }
    sets.push_back(a);
    sets.push_back(b);
  }
  std::vector<std::vector<std::size_t>> supports;
  for (const auto &s : sets) supports.emplace_back(s.begin(), s.end());
  const FeatureSet set(Named(sets.size()), supports, kUniverse);
  double worst = 0.0;
  std::size_t zero_joint = 0;
  for (std::size_t p = 0; p < 100; ++p) {
    const std::size_t i = 2 * p;
    const std::size_t j = i + 1;
    std::size_t joint = 0;
    for (auto x : sets[i]) joint += sets[j].count(x);
    zero_joint += joint == 0;
    worst = std::max(worst, std::fabs(set.Pmi(i, j) - oracle::Pmi(sets[i], sets[j], kUniverse)));
  }
  return {worst <= kTol && zero_joint > 0,
          "100 pairs, |U|=50, max |err| " + FormatDouble(worst) + " <= 1e-9, zero-joint pairs " +
              std::to_string(zero_joint)};
}

Outcome GaNearOptimal() {
  constexpr std::size_t kUniverse = 50;
  std::mt19937_64 gen(4242);
  int hits = 0;
  double worst_formula = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    std::vector<std::set<std::size_t>> sets;
    std::vector<std::vector<std::size_t>> supports;
    for (int f = 0; f < 12; ++f) {
      sets.push_back(RandomSubset(gen, kUniverse, 0.1, 0.7));
      supports.emplace_back(sets.back().begin(), sets.back().end());
    }
    const FeatureSet set(Named(12), supports, kUniverse);
    GAConfig cfg;
    cfg.k = 3;
    cfg.seed = 1000 + static_cast<std::uint64_t>(inst);
    const auto result = SelectFeatureGroups(set, cfg);
    const double best = oracle::ExhaustiveBest(sets, kUniverse, 3, cfg.alpha);
    if (!result.groups.empty() && result.groups[0].fitness >= best - 1e-9) ++hits;
    std::vector<std::size_t> members;
    for (const auto &id : result.groups[0].features) {
      members.push_back(static_cast<std::size_t>(std::stoi(id.substr(8))));
    }
    worst_formula = std::max(worst_formula, std::fabs(result.groups[0].fitness -
                                                      oracle::Fitness(sets, kUniverse, members, cfg.alpha)));
  }
  return {hits >= 18 && worst_formula <= 1e-9,
          std::to_string(hits) + "/20 at exhaustive optimum (C(12,3)=220, tol 1e-9, need >= 18)"};
}

Concept SingleFeatureConcept(const std::string &id, double weight) {
  Concept c;
  c.features.push_back(ParseFeature(id));
  c.group.features = {id};
  c.weights = {weight};
  return c;
}

Status OracleStatus(double s) {
  if (s > 1.0) return Status::kIncluded;
  if (s > 0.5) return Status::kCandidate;
  return Status::kExcluded;
}

Outcome StrictThresholds() {
  std::mt19937_64 gen(99);
  std::vector<double> scores{0.5, 1.0, std::nextafter(0.5, 1.0), std::nextafter(1.0, 2.0),
                             std::nextafter(0.5, 0.0), std::nextafter(1.0, 0.0), 0.0, -0.25};
  while (scores.size() < 1000) scores.push_back(std::uniform_real_distribution<double>(-0.5, 2.0)(gen));
  std::size_t mismatches = 0;
  for (double s : scores) mismatches += StatusForScore(s) != OracleStatus(s);

  // Same rule through classification, including a seed figure below threshold.
  DescriptionStore store;
  std::vector<std::string> scope;
  std::vector<double> weights;
  for (int f = 0; f < 200; ++f) {
    const std::string id = "f" + std::to_string(1000 + f);
    const int hits = static_cast<int>(gen() % 11);
    for (int d = 0; d < 10; ++d) store.Add(testing::Desc(id, testing::Places({d < hits ? "A" : "B"})));
    scope.push_back(id);
  }
  const auto model = SingleFeatureConcept("Location(A)", std::uniform_real_distribution<double>(0.8, 2.2)(gen));
  std::size_t classify_mismatch = 0;
  for (const auto &a : Classify(model, scope, store)) classify_mismatch += a.status != OracleStatus(a.score);

  // Seed positives in a real identify run get no status bonus.
  const Corpus corpus = testing::TangCorpus();
  const Json spec = testing::ReadJsonFixture("golden/tang_identify.json");
  Session session("acceptance", corpus, [] { return std::string(); });
  const auto &it =
      session.Identify(ResolveScope(corpus, ScopeQuery::FromJson(spec["scope"])), IdentifyConfig::FromJson(spec["config"]));
  std::size_t seeds_not_included = 0;
  for (const auto &seed : it.positives) {
    const auto *a = it.Find(seed);
    if (a->status != OracleStatus(a->score)) ++classify_mismatch;
    seeds_not_included += a->status != Status::kIncluded;
  }
  return {mismatches == 0 && classify_mismatch == 0 && seeds_not_included > 0,
          "1000 scores, " + std::to_string(mismatches) + " status mismatches; classify mismatches " +
              std::to_string(classify_mismatch) + "; seeds below threshold not included: " +
              std::to_string(seeds_not_included)};
}

Outcome SgdClosedForm() {
  std::mt19937_64 gen(31337);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  double worst = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    std::vector<std::vector<double>> x(200, std::vector<double>(5));
    std::vector<double> y(200);
    std::vector<double> w(5);
    for (auto &wi : w) wi = std::uniform_real_distribution<double>(-1.0, 2.0)(gen);
    for (std::size_t i = 0; i < 200; ++i) {
      y[i] = noise(gen);
      for (std::size_t j = 0; j < 5; ++j) {
        x[i][j] = unit(gen);
        y[i] += w[j] * x[i][j];
      }
    }
    const TrainConfig defaults;
    const auto fit = FitLinearSgd(x, y, defaults.epochs, defaults.lr, 500 + static_cast<std::uint64_t>(inst));
    const auto exact = oracle::NormalEquations(x, y);
    for (std::size_t j = 0; j < 5; ++j) worst = std::max(worst, std::fabs(fit.weights[j] - exact[j]));
  }
  return {worst <= 1e-3, "10 instances 200x5, max L-inf " + FormatDouble(worst) + " <= 1e-3"};
}

Outcome DbscanOracle() {
  std::mt19937_64 gen(2718);
  int equal = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = std::uniform_int_distribution<int>(0, 80)(gen);
    std::vector<std::int64_t> years;
    DescriptionStore store;
    std::vector<std::string> figures;
    for (int i = 0; i < n; ++i) {
      years.push_back(std::uniform_int_distribution<std::int64_t>(690, 770)(gen));
      const std::string f = "F" + std::to_string(i % 9);
      store.Add(testing::Desc(f, testing::Years({years.back()})));
      figures.push_back(f);
    }
    const TimeRangeParams params;
    std::vector<std::string> want;
    for (const auto &[lo, hi] : oracle::TimeRanges(years, params.eps_years, params.min_pts, params.occurrence_ratio)) {
      want.push_back("TimeRange(" + std::to_string(lo) + "," + std::to_string(hi) + ")");
    }
    std::vector<std::string> got;
    for (const auto &f : ExtractTimeRanges(store, figures, params)) got.push_back(f.id());
    equal += got == want;
  }
  return {equal == 50, std::to_string(equal) + "/50 multisets equal to naive DBSCAN"};
}

Outcome GirvanNewmanOracle() {
  std::mt19937_64 gen(1618);
  int equal = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + gen() % 12;
    const double p = std::uniform_real_distribution<double>(0.1, 0.6)(gen);
    oracle::EdgeList edges;
    std::vector<WeightedEdge> weighted;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (std::uniform_real_distribution<double>(0, 1)(gen) < p) {
          edges.emplace_back(u, v);
          weighted.push_back({u, v, 1.0 + static_cast<double>(gen() % 3)});
        }
      }
    }
    equal += GirvanNewman(UndirectedGraph::Simple(n, weighted)).community == oracle::GirvanNewman(n, edges);
  }
  std::vector<WeightedEdge> bridge;
  for (std::size_t base : {0u, 4u}) {
    for (std::size_t u = 0; u < 4; ++u) {
      for (std::size_t v = u + 1; v < 4; ++v) bridge.push_back({base + u, base + v, 1.0});
    }
  }
  bridge.push_back({3, 4, 1.0});
  const auto split = GirvanNewman(UndirectedGraph::Simple(8, bridge));
  const bool two = split.count == 2 && split.community == std::vector<std::size_t>{0, 0, 0, 0, 1, 1, 1, 1};
  return {equal == 30 && two, std::to_string(equal) + "/30 random graphs (<= 12 nodes) equal to brute force; "
                                  "two cliques + bridge -> " + std::to_string(split.count) + " communities"};
}

struct PlantedRun {
  PlantedCorpus planted;
  Corpus corpus;
};

PlantedRun BuildPlanted(std::uint64_t seed) {
  PlantedCorpus planted = GeneratePlantedCorpus(PlantedCorpusConfig{}, seed);
  SchemaMapping schema = SchemaMapping::FromJson(planted.schema);
  IngestResult ingested = IngestGraph(schema, planted.records);
  Corpus corpus = Corpus::Build(std::move(schema), std::move(ingested.graph), planted.templates, planted.walk, seed);
  return {std::move(planted), std::move(corpus)};
}

std::vector<std::string> SeedPositives(const PlantedCorpus &planted, std::uint64_t seed) {
  Rng rng(StreamSeed(seed, "seed-positives"));
  std::vector<std::string> out;
  for (std::size_t i : rng.SampleWithoutReplacement(planted.planted.size(), 10)) out.push_back(planted.planted[i]);
  return out;
}

Outcome PlantedRecovery() {
  int passing = 0;
  std::size_t composites_min = 5;
  double planted_min = 1.0;
  double noise_max = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const PlantedRun run = BuildPlanted(seed);
    const auto &plant = run.planted.planted;
    std::size_t composites = 0;
    for (const auto &f : run.planted.planted_features) {
      composites += f.is_composite();
      for (const auto &fig : run.corpus.figures) {
        const double v = Frequency(f, fig, run.corpus.store).value_or(0.0);
        if (std::binary_search(plant.begin(), plant.end(), fig)) {
          planted_min = std::min(planted_min, v);
        } else {
          noise_max = std::max(noise_max, v);
        }
      }
    }
    composites_min = std::min(composites_min, composites);
    IdentifyConfig cfg = IdentifyConfig::FromJson(Json{{"seed", seed}});
    cfg.positives = SeedPositives(run.planted, seed);
    Session session("acceptance", run.corpus, [] { return std::string(); });
    const auto included = session.Identify(run.corpus.figures, cfg).Included();
    std::size_t tp = 0;
    for (const auto &f : included) tp += std::binary_search(plant.begin(), plant.end(), f);
    const double precision = included.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(included.size());
    const double recall = static_cast<double>(tp) / static_cast<double>(plant.size());
    passing += precision >= 0.8 && recall >= 0.8;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%.2f/%.2f", seed == 1 ? "" : " ", precision, recall);
    per_seed += buf;
  }
  const bool fixture_ok = planted_min >= 0.5 && noise_max <= 0.1 && composites_min >= 1;
  return {passing >= 8 && fixture_ok,
          std::to_string(passing) + "/10 seeds with P>=0.8 and R>=0.8 (need >= 8); P/R " + per_seed +
              "; plant freq min " + FormatDouble(planted_min) + ", noise max " + FormatDouble(noise_max)};
}

Outcome Determinism() {
  std::string json[2];
  std::string csv[2];
  for (int rep = 0; rep < 2; ++rep) {
    const PlantedRun run = BuildPlanted(3);
    IdentifyConfig cfg = IdentifyConfig::FromJson(Json{{"seed", 3}});
    cfg.positives = SeedPositives(run.planted, 3);
    Session session("acceptance", run.corpus, [] { return std::string("2026-01-01T00:00:00Z"); });
    json[rep] = session.Identify(run.corpus.figures, cfg).ToJson().dump();
    csv[rep] = session.ExportCsv(0);
  }
  const bool same = json[0] == json[1] && csv[0] == csv[1];
  return {same, std::string("iteration JSON ") + (json[0] == json[1] ? "identical" : "differs") + " (" +
                    std::to_string(json[0].size()) + " bytes), CSV " + (csv[0] == csv[1] ? "identical" : "differs") +
                    " (" + std::to_string(csv[0].size()) + " bytes)"};
}

Outcome Parser() {
  std::mt19937_64 gen(8080);
  int round_trips = 0;
  for (int i = 0; i < 1000; ++i) {
    const Expr e = testing::RandomExpr(gen, 4);
    const std::string text = PrintExpression(e);
    round_trips += ParseExpression(text) == e && PrintExpression(ParseExpression(text)) == text;
  }
  int offsets = 0;
  const auto cases = testing::MalformedExpressions();
  for (const auto &c : cases) {
    try {
      ParseExpression(c.text);
    } catch (const Error &e) {
      offsets += e.code() == ErrorCode::kParseError && e.position() == c.offset;
    }
  }
  return {round_trips == 1000 && offsets == 20 && cases.size() == 20,
          std::to_string(round_trips) + "/1000 round trips; " + std::to_string(offsets) + "/" +
              std::to_string(cases.size()) + " malformed inputs with exact offsets"};
}

Outcome Timeline() {
  const KnowledgeGraph graph = testing::TimelineGraph();
  const SchemaMapping schema = testing::TangSchema();
  std::vector<std::string> figures;
  for (const auto &n : graph.nodes()) {
    if (graph.TypeOf(n).kind == NodeKind::kFigure) figures.push_back(n.id);
  }
  const auto events = DeriveEvents(graph, schema, figures).records;
  std::size_t window = 0;
  for (const auto &bin : EventTimeline(events)) {
    if (bin.year >= 710 && bin.year <= 712) window += bin.count;
  }
  return {window == 96, "events in 710-712: " + std::to_string(window) + " (expected 96)"};
}

}  // namespace
}  // namespace cohort

int main() {
  using namespace cohort;
  Run("pmi_oracle", 1.0, PmiOracle);
  Run("ga_near_optimal", 10.0, GaNearOptimal);
  Run("strict_thresholds", 0.0, StrictThresholds);
  Run("sgd_closed_form", 5.0, SgdClosedForm);
  Run("dbscan_oracle", 2.0, DbscanOracle);
  Run("girvan_newman_oracle", 0.0, GirvanNewmanOracle);
  Run("planted_recovery", 60.0, PlantedRecovery);
  Run("determinism", 0.0, Determinism);
  Run("expression_parser", 0.0, Parser);
  Run("timeline_96", 0.0, Timeline);
  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
