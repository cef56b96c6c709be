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
#ifndef COHORT_FUSION_HPP_
#define COHORT_FUSION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohort/feature.hpp"
#include "cohort/graph.hpp"
#include "cohort/selection.hpp"
#include "cohort/walker.hpp"

namespace cohort {

struct FeatureVector {
  std::string figure;
  std::vector<double> values;
  // Set when the figure has no descriptions; values are then all zero.
  bool zero_descriptions = false;
};

FeatureVector MakeFeatureVector(std::string_view figure, std::span<const Feature> features,
                                const DescriptionStore &store);

struct TrainConfig {
  double neg_ratio = 5.0;
  std::size_t epochs = 300;
  double lr = 0.05;
  std::uint64_t seed = 0;
  // A typical positive scores twice the inclusion threshold.
  double positive_target = 2.0;
  double negative_target = 0.0;
  // Report the mean of the iterates over the final half of the epochs
  // instead of the last iterate.
  bool tail_averaging = true;
  // After a first fit, negatives are redrawn from the complement figures the
  // first model excludes, and the model is refit once.
  bool reliable_negatives = true;

  void Validate() const;
  static TrainConfig FromJson(const Json &j, const TrainConfig &defaults);
  static TrainConfig FromJson(const Json &j);
  OrderedJson ToJson() const;
};

struct LinearFit {
  std::vector<double> weights;
  std::vector<double> loss_trace;  // mean squared error after each epoch
};

// Least squares without intercept by plain SGD from zero weights; the sample
// order is reshuffled every epoch from `seed`.
LinearFit FitLinearSgd(std::span<const std::vector<double>> x, std::span<const double> y, std::size_t epochs,
                       double lr, std::uint64_t seed, bool tail_averaging = true);

struct TrainingMeta {
  TrainConfig config;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::vector<double> loss_trace;
  bool empty_scope_complement = false;
  bool retrain_needed = false;
};

struct Concept {
  FeatureGroup group;
  std::vector<Feature> features;  // aligned with group.features
  std::vector<double> weights;
  TrainingMeta meta;

  std::size_t k() const { return features.size(); }
  OrderedJson ToJson() const;
  static Concept FromJson(const Json &j);
};

// Features of `group` resolved against `candidates` by id.
std::vector<Feature> ResolveGroup(const FeatureGroup &group, std::span<const Feature> candidates);

Concept TrainConcept(const FeatureGroup &group, std::vector<Feature> features, std::span<const std::string> positives,
                     std::span<const std::string> scope, const DescriptionStore &store, const TrainConfig &config);

double CohortScore(std::span<const double> weights, std::span<const double> values);
double CohortScore(const Concept &model, const FeatureVector &vector);

enum class Status { kIncluded, kCandidate, kExcluded };
enum class Origin { kModel, kManual };

std::string_view StatusName(Status s);
std::string_view OriginName(Origin o);
Status StatusFromName(std::string_view name);
Origin OriginFromName(std::string_view name);

struct Thresholds {
  double include = 1.0;
  double candidate = 0.5;
};

// Strict comparisons: included above `include`, candidate above `candidate`.
Status StatusForScore(double score, const Thresholds &t = {});

struct FigureAssignment {
  std::string figure;
  double score = 0.0;
  Status status = Status::kExcluded;
  Origin origin = Origin::kModel;
  bool zero_descriptions = false;
};

// Sorted by figure id.
using CohortAssignment = std::vector<FigureAssignment>;

CohortAssignment Classify(const Concept &model, std::span<const std::string> scope, const DescriptionStore &store,
                          const Thresholds &t = {});

// Recomputes scores and model statuses; manual entries keep their status.
void Rescore(const Concept &model, CohortAssignment &assignment, const DescriptionStore &store,
             const Thresholds &t = {});

std::string FormatDouble(double v);  // shortest text that parses back exactly
double ParseDouble(std::string_view text);

}  // namespace cohort

#endif  // COHORT_FUSION_HPP_
