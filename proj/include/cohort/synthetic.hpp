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
#ifndef COHORT_SYNTHETIC_HPP_
#define COHORT_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cohort/feature.hpp"
#include "cohort/graph.hpp"
#include "cohort/walker.hpp"

namespace cohort {

// Corpus with a known cohort: planted figures hold most of their postings at
// one office in one place within a three-year window; the remaining figures
// post elsewhere and at years far from that window.
struct PlantedCorpusConfig {
  std::size_t figures = 200;
  std::size_t planted = 30;
  std::size_t postings_per_figure = 6;
  std::size_t planted_postings = 5;  // per planted figure, at the planted office
  std::size_t offices = 20;
  std::size_t places = 10;
  std::int64_t window_lo = 737;
  std::int64_t window_hi = 739;
  std::int64_t year_lo = 600;
  std::int64_t year_hi = 900;
  std::int64_t guard_years = 8;  // noise years keep this distance from the window
  int walks_per_figure = 16;
};

struct PlantedCorpus {
  Json schema;     // schema mapping document
  Json templates;  // template document
  std::vector<Record> records;
  std::vector<std::string> figures;  // sorted
  std::vector<std::string> planted;  // sorted
  std::vector<Feature> planted_features;
  WalkConfig walk;
};

PlantedCorpus GeneratePlantedCorpus(const PlantedCorpusConfig &config, std::uint64_t seed);

struct PlantedTrial {
  std::uint64_t seed = 0;
  std::size_t included = 0;
  std::size_t true_positives = 0;
  double precision = 0.0;
  double recall = 0.0;
  // Realized description frequencies of the planted features: minimum over
  // planted figures and maximum over the rest.
  double planted_min_frequency = 0.0;
  double noise_max_frequency = 0.0;
  std::vector<std::string> concept_features;
};

// Full identification over the whole corpus, seeded with `seed_positives`
// planted figures drawn at random.
PlantedTrial RunPlantedTrial(const PlantedCorpusConfig &config, std::uint64_t seed, std::size_t seed_positives = 10);

}  // namespace cohort

#endif  // COHORT_SYNTHETIC_HPP_
