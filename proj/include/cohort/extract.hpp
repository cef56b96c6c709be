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
#ifndef COHORT_EXTRACT_HPP_
#define COHORT_EXTRACT_HPP_

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cohort/feature.hpp"
#include "cohort/walker.hpp"

namespace cohort {

struct YearCluster {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::size_t size = 0;  // core + border members
  bool operator==(const YearCluster &) const = default;
};

// DBSCAN over a multiset of years. Points are visited in ascending order; a
// border point reachable from two clusters joins the first. A point is core
// when at least min_pts points (itself included) lie within eps.
std::vector<YearCluster> Dbscan1D(std::span<const std::int64_t> years, std::int64_t eps, std::size_t min_pts);

struct TimeRangeParams {
  std::int64_t eps_years = 2;
  std::size_t min_pts = 3;
  double occurrence_ratio = 0.30;
};

struct RelationshipParams {
  std::size_t min_community = 5;
  // Directed strongly-connected components instead of undirected communities.
  bool directed_scc = false;
};

struct ComposeParams {
  double min_joint_support_ratio = 0.10;
  std::size_t max_arity = 3;
  std::size_t max_output = 200;
};

struct ExtractionParams {
  TimeRangeParams time_range;
  std::size_t top_k = 3;
  RelationshipParams relationship;
  double celebrity_link_ratio = 0.30;
  double entity_link_ratio = 0.30;
  ComposeParams compose;
};

// Clusters whose mention count exceeds occurrence_ratio of all year mentions.
std::vector<Feature> ExtractTimeRanges(const DescriptionStore &store, std::span<const std::string> figures,
                                       const TimeRangeParams &params = {});

// kind is kLocation or kAffiliation; ties broken by id ascending.
std::vector<Feature> ExtractTopK(const DescriptionStore &store, std::span<const std::string> figures,
                                 FeatureKind kind, std::size_t k = 3);

std::vector<Feature> ExtractRelationships(const DescriptionStore &store, std::span<const std::string> figures,
                                          const RelationshipParams &params = {});

// Persons co-mentioned with more than link_ratio * |figures| selected figures.
std::vector<Feature> ExtractCelebrities(const DescriptionStore &store, std::span<const std::string> figures,
                                        double link_ratio = 0.30);

// Non-person entities (including places and offices) linked with more than
// link_ratio * |figures| selected figures and absent from `covered`.
std::vector<Feature> ExtractEntities(const DescriptionStore &store, std::span<const std::string> figures,
                                     const std::set<std::string> &covered, double link_ratio = 0.30);

// All 2- and 3-subsets with joint support >= ratio * |figures|, best first,
// truncated to max_output. Joint support uses per-description AND.
std::vector<Feature> ComposeFeatures(std::span<const Feature> atomics, const DescriptionStore &store,
                                     std::span<const std::string> figures, const ComposeParams &params = {});

// The six atomic families in order, followed by composites.
struct ExtractedFeatures {
  std::vector<Feature> atomics;
  std::vector<Feature> composites;
  std::vector<Feature> All() const;
};

ExtractedFeatures ExtractAll(const DescriptionStore &store, std::span<const std::string> figures,
                             const ExtractionParams &params = {});

}  // namespace cohort

#endif  // COHORT_EXTRACT_HPP_
