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
#ifndef COHORT_SELECTION_HPP_
#define COHORT_SELECTION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cohort/feature.hpp"
#include "cohort/graph.hpp"

namespace cohort {

// Candidate features with their supports over a probability universe
// (figure-count ratios). Pairwise PMI values are precomputed.
class FeatureSet {
 public:
  FeatureSet(std::vector<Feature> features, std::span<const std::string> universe, const DescriptionStore &store);
  // Supports given directly as universe indices.
  FeatureSet(std::vector<Feature> features, std::vector<std::vector<std::size_t>> supports,
             std::size_t universe_size);

  std::size_t size() const { return features_.size(); }
  std::size_t universe_size() const { return universe_size_; }
  const std::vector<Feature> &features() const { return features_; }
  const Feature &feature(std::size_t i) const { return features_.at(i); }

  std::size_t support_count(std::size_t i) const { return counts_.at(i); }
  std::size_t joint_count(std::size_t i, std::size_t j) const;
  double p(std::size_t i) const;
  double p_joint(std::size_t i, std::size_t j) const;

  // ln(p(i,j) / (p(i) p(j))); a zero joint is replaced by 1/(2|U|).
  // Throws Error(kZeroMarginal).
  double Pmi(std::size_t i, std::size_t j) const;

  // Sum over j != i of Pmi(i, j).
  double PmiRowSum(std::size_t i) const;

 private:
  void Precompute();

  std::vector<Feature> features_;
  std::vector<std::vector<std::uint64_t>> bits_;
  std::vector<std::size_t> counts_;
  std::size_t universe_size_ = 0;
  std::vector<double> pmi_;  // row-major, NaN where undefined
  std::vector<double> row_sums_;
};

// Mean pairwise dependence inside a group: (1/k^2) sum over ordered i != j of PMI.
double Redundancy(const FeatureSet &set, std::span<const std::size_t> group);
// (1/(k |F|)) sum over group members i and all features j != i of PMI.
double Relevance(const FeatureSet &set, std::span<const std::size_t> group);

struct GAConfig {
  std::size_t population = 64;
  std::size_t generations = 200;
  double crossover_rate = 0.8;
  double mutation_rate = 0.1;
  std::size_t elitism = 4;
  std::size_t k = 5;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  std::size_t n_solutions = 5;
  std::size_t tournament = 3;

  void Validate() const;
  // Unspecified keys keep the values of `defaults`.
  static GAConfig FromJson(const Json &j, const GAConfig &defaults);
  static GAConfig FromJson(const Json &j);
  OrderedJson ToJson() const;
};

struct FeatureGroup {
  std::vector<std::string> features;  // canonical ids, ascending
  double redundancy = 0.0;
  double relevance = 0.0;
  double fitness = 0.0;
  // Per member (aligned with `features`): the two highest-PMI alternatives
  // from outside the group.
  std::vector<std::vector<std::string>> redundant_neighbors;

  std::size_t IndexOf(std::string_view id) const;  // npos if absent
  OrderedJson ToJson() const;
  static FeatureGroup FromJson(const Json &j);
};

double Fitness(const FeatureSet &set, std::span<const std::size_t> group, double alpha);

FeatureGroup MakeGroup(const FeatureSet &set, std::vector<std::size_t> members, double alpha);

struct SelectionResult {
  std::vector<FeatureGroup> groups;
  std::vector<double> best_fitness_per_generation;
};

// Genetic search over k-subsets maximising alpha * relevance - redundancy.
// `seeded` genomes (feature indices) join generation 0. Throws
// Error(kInsufficientFeatures) when fewer than k features exist.
SelectionResult SelectFeatureGroups(const FeatureSet &set, const GAConfig &config,
                                    std::span<const std::vector<std::size_t>> seeded = {});

}  // namespace cohort

#endif  // COHORT_SELECTION_HPP_
