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
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cohort/error.hpp"
#include "cohort/fusion.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace cohort {
namespace {

using testing::Desc;

Concept MakeConcept(std::vector<std::string> ids, std::vector<double> weights) {
  Concept c;
  for (const auto &id : ids) c.features.push_back(ParseFeature(id));
  c.group.features = std::move(ids);
  c.weights = std::move(weights);
  return c;
}

TrainConfig Plain() {
  TrainConfig t;
  t.positive_target = 1.0;
  t.reliable_negatives = false;
  return t;
}

TEST(FeatureVector, FrequenciesPerFeature) {
  DescriptionStore store;
  const int hits[5] = {4, 0, 10, 2, 5};
  for (int d = 0; d < 10; ++d) {
    DescriptionTokens t;
    if (d < hits[0]) t.locations.push_back("Jingzhou");
    if (d < hits[1]) t.locations.push_back("Luoyang");
    if (d < hits[2]) t.years.push_back(737);
    if (d < hits[3]) t.offices.push_back("O1");
    if (d < hits[4]) t.co_figures.push_back("F1");
    store.Add(Desc("F3", t));
  }
  const std::vector<Feature> fs{ParseFeature("Location(Jingzhou)"), ParseFeature("Location(Luoyang)"),
                                ParseFeature("TimeRange(730,740)"), ParseFeature("Affiliation(O1)"),
                                ParseFeature("Celebrity(F1)")};
  const auto v = MakeFeatureVector("F3", fs, store);
  EXPECT_FALSE(v.zero_descriptions);
  const std::vector<double> want{0.4, 0.0, 1.0, 0.2, 0.5};
  ASSERT_EQ(v.values.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_DOUBLE_EQ(v.values[i], want[i]);

  const auto none = MakeFeatureVector("F404", fs, store);
  EXPECT_TRUE(none.zero_descriptions);
  EXPECT_EQ(none.values, std::vector<double>(5, 0.0));
}

TEST(FeatureVector, AllOnes) {
  DescriptionStore store;
  DescriptionTokens t;
  t.locations = {"Jingzhou"};
  t.years = {737};
  for (int d = 0; d < 3; ++d) store.Add(Desc("F1", t));
  const std::vector<Feature> fs{ParseFeature("Location(Jingzhou)"), ParseFeature("TimeRange(737,737)"),
                                ParseFeature("[Location(Jingzhou) & TimeRange(737,737)]")};
  EXPECT_EQ(MakeFeatureVector("F1", fs, store).values, std::vector<double>(3, 1.0));
}

TEST(Sgd, SeparableToyConvergesToOne) {
  DescriptionStore store;
  std::vector<std::string> scope;
  std::vector<std::string> positives;
  for (int i = 0; i < 6; ++i) {
    const std::string f = "P" + std::to_string(i);
    store.Add(Desc(f, testing::Places({"Jingzhou"})));
    positives.push_back(f);
    scope.push_back(f);
  }
  for (int i = 0; i < 40; ++i) {
    const std::string f = "N" + std::to_string(i);
    store.Add(Desc(f, testing::Places({"Luoyang"})));
    scope.push_back(f);
  }
  std::sort(scope.begin(), scope.end());
  FeatureGroup group;
  group.features = {"Location(Jingzhou)"};
  const auto model = TrainConcept(group, {ParseFeature("Location(Jingzhou)")}, positives, scope, store, Plain());
  ASSERT_EQ(model.weights.size(), 1u);
  EXPECT_LT(std::fabs(model.weights[0] - 1.0), 0.02);
  EXPECT_EQ(model.meta.positives, 6u);
  EXPECT_EQ(model.meta.negatives, 30u);
  EXPECT_FALSE(model.meta.empty_scope_complement);
  EXPECT_EQ(model.meta.loss_trace.size(), Plain().epochs);
}

TEST(Sgd, PositivesEqualScopeIsFlagged) {
  DescriptionStore store;
  std::vector<std::string> scope;
  for (int i = 0; i < 4; ++i) {
    scope.push_back("P" + std::to_string(i));
    store.Add(Desc(scope.back(), testing::Places({"Jingzhou"})));
  }
  FeatureGroup group;
  group.features = {"Location(Jingzhou)"};
  const auto model = TrainConcept(group, {ParseFeature("Location(Jingzhou)")}, scope, scope, store, Plain());
  EXPECT_TRUE(model.meta.empty_scope_complement);
  EXPECT_EQ(model.meta.negatives, 0u);
  EXPECT_NEAR(model.weights[0], 1.0, 1e-3);
}

TEST(Sgd, MatchesNormalEquations) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.1);
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
    const auto fit = FitLinearSgd(x, y, 300, 0.05, static_cast<std::uint64_t>(inst));
    const auto exact = oracle::NormalEquations(x, y);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(fit.weights[j], exact[j], 1e-3) << "instance " << inst;
  }
}

TEST(Training, Preconditions) {
  DescriptionStore store;
  store.Add(Desc("A", testing::Places({"X"})));
  store.Add(Desc("B", testing::Places({"X"})));
  FeatureGroup group;
  group.features = {"Location(X)"};
  const std::vector<Feature> fs{ParseFeature("Location(X)")};
  const std::vector<std::string> scope{"A", "B", "C"};
  try {
    const std::vector<std::string> one{"A"};
    TrainConcept(group, fs, one, scope, store, Plain());
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewPositives);
  }
  const std::vector<std::string> outside{"A", "Z"};
  EXPECT_THROW(TrainConcept(group, fs, outside, scope, store, Plain()), Error);
}

TEST(Training, DeterministicAndSerializable) {
  DescriptionStore store;
  std::vector<std::string> scope;
  for (int i = 0; i < 30; ++i) {
    const std::string f = "F" + std::to_string(100 + i);
    scope.push_back(f);
    DescriptionTokens t;
    if (i % 3 == 0) t.locations = {"A"};
    if (i % 2 == 0) t.offices = {"O"};
    store.Add(Desc(f, t));
    store.Add(Desc(f, testing::Years({700 + i})));
  }
  FeatureGroup group;
  group.features = {"Affiliation(O)", "Location(A)"};
  const std::vector<Feature> fs{ParseFeature("Affiliation(O)"), ParseFeature("Location(A)")};
  const std::vector<std::string> pos{"F100", "F103", "F106"};
  TrainConfig cfg;
  cfg.seed = 4;
  const auto a = TrainConcept(group, fs, pos, scope, store, cfg);
  const auto b = TrainConcept(group, fs, pos, scope, store, cfg);
  EXPECT_EQ(a.ToJson().dump(), b.ToJson().dump());
  const auto back = Concept::FromJson(Json::parse(a.ToJson().dump()));
  EXPECT_EQ(back.ToJson().dump(), a.ToJson().dump());
  EXPECT_EQ(back.weights, a.weights);
}

TEST(Score, Basics) {
  const std::vector<double> zeros(5, 0.0);
  EXPECT_EQ(CohortScore(zeros, zeros), 0.0);
  const std::vector<double> w{1, 0, 0, 0, 0};
  const std::vector<double> v{0.4, 0.3, 0.2, 0.1, 0.9};
  EXPECT_DOUBLE_EQ(CohortScore(w, v), 0.4);
  const std::vector<double> w2{0.3, -0.2, 1.1, 0.5, 0.25};
  const std::vector<double> v2{0.2, 0.1, 0.4, 0.3, 0.45};
  std::vector<double> doubled;
  for (double x : v2) doubled.push_back(2 * x);
  EXPECT_NEAR(CohortScore(w2, doubled), 2 * CohortScore(w2, v2), 1e-12);
  const std::vector<double> short_v{1.0};
  try {
    CohortScore(w, short_v);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(Thresholds, StrictComparisons) {
  EXPECT_EQ(StatusForScore(1.2), Status::kIncluded);
  EXPECT_EQ(StatusForScore(0.7), Status::kCandidate);
  EXPECT_EQ(StatusForScore(0.5), Status::kExcluded);
  EXPECT_EQ(StatusForScore(1.0), Status::kCandidate);
  EXPECT_EQ(StatusForScore(std::nextafter(1.0, 2.0)), Status::kIncluded);
  EXPECT_EQ(StatusForScore(std::nextafter(0.5, 1.0)), Status::kCandidate);
}

TEST(Classify, SeedBelowThresholdIsExcluded) {
  DescriptionStore store;
  for (int d = 0; d < 10; ++d) store.Add(Desc("seed", testing::Places({d < 3 ? "A" : "B"})));
  store.Add(Desc("strong", testing::Places({"A"})));
  const auto model = MakeConcept({"Location(A)"}, {1.0});
  const std::vector<std::string> scope{"seed", "strong", "empty"};
  const auto assignment = Classify(model, scope, store);
  ASSERT_EQ(assignment.size(), 3u);
  EXPECT_EQ(assignment[0].figure, "empty");
  EXPECT_TRUE(assignment[0].zero_descriptions);
  EXPECT_EQ(assignment[1].figure, "seed");
  EXPECT_DOUBLE_EQ(assignment[1].score, 0.3);
  EXPECT_EQ(assignment[1].status, Status::kExcluded);
  EXPECT_EQ(assignment[2].status, Status::kCandidate);  // 1.0 is not over 1.0
  EXPECT_TRUE(Classify(model, {}, store).empty());
}

TEST(Classify, RescoreKeepsManualLabels) {
  DescriptionStore store;
  store.Add(Desc("a", testing::Places({"A"})));
  store.Add(Desc("b", testing::Places({"A"})));
  auto model = MakeConcept({"Location(A)"}, {2.0});
  const std::vector<std::string> scope{"a", "b"};
  auto assignment = Classify(model, scope, store);
  assignment[0].status = Status::kExcluded;
  assignment[0].origin = Origin::kManual;
  model.weights = {0.1};
  Rescore(model, assignment, store);
  EXPECT_EQ(assignment[0].status, Status::kExcluded);
  EXPECT_EQ(assignment[0].origin, Origin::kManual);
  EXPECT_DOUBLE_EQ(assignment[0].score, 0.1);
  EXPECT_EQ(assignment[1].status, Status::kExcluded);
  EXPECT_EQ(assignment[1].origin, Origin::kModel);
}

TEST(Numbers, ShortestRoundTrip) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(0.0), "0");
  EXPECT_EQ(FormatDouble(-0.0), "0");
  EXPECT_EQ(FormatDouble(1.5), "1.5");
  std::mt19937_64 gen(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::uniform_real_distribution<double>(-10, 10)(gen);
    EXPECT_EQ(ParseDouble(FormatDouble(v)), v);
  }
}

TEST(TrainConfigJson, RoundTrip) {
  TrainConfig t;
  t.seed = 99;
  t.positive_target = 1.0;
  const auto back = TrainConfig::FromJson(Json::parse(t.ToJson().dump()));
  EXPECT_EQ(back.ToJson().dump(), t.ToJson().dump());
  EXPECT_THROW(TrainConfig::FromJson(Json::parse(R"({"lr": -1})")), Error);
}

}  // namespace
}  // namespace cohort
