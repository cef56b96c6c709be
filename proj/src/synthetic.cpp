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
#include "cohort/synthetic.hpp"

#include <algorithm>
#include <cstdio>

#include "cohort/error.hpp"
#include "cohort/random.hpp"
#include "cohort/session.hpp"

namespace cohort {

namespace {

std::string NumberedId(const char *prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04zu", prefix, i);
  return buf;
}

Json PlantedSchema() {
  return Json::parse(R"({
    "node_types": [
      {"name": "person", "kind": "figure"},
      {"name": "posting", "kind": "event"},
      {"name": "office", "kind": "entity", "role": "office"},
      {"name": "place", "kind": "entity", "role": "location"}
    ],
    "edge_types": [
      {"name": "do", "source": "person", "target": "posting"},
      {"name": "officeIs", "source": "posting", "target": "office"},
      {"name": "locatedIn", "source": "office", "target": "place"}
    ],
    "tables": [
      {"table": "person", "node_type": "person", "id": "id", "label": "name"},
      {"table": "place", "node_type": "place", "id": "id", "label": "name"},
      {"table": "office", "node_type": "office", "id": "id", "label": "name",
       "foreign_keys": [{"column": "place", "table": "place", "edge_type": "locatedIn", "direction": "out"}]},
      {"table": "posting", "node_type": "posting", "id": "id", "label": "title",
       "attrs": [{"column": "year", "kind": "year"}],
       "foreign_keys": [
         {"column": "person", "table": "person", "edge_type": "do", "direction": "in"},
         {"column": "office", "table": "office", "edge_type": "officeIs", "direction": "out"}]}
    ],
    "event_categories": {"do": "politics"}
  })");
}

Json PlantedTemplates() {
  return Json::parse(R"([
    {"id": "posting", "anchor": "person", "render": "{0} served as {2} in {1.year} at {3}",
     "steps": [{"edge": "do", "dir": "out", "node": "posting"},
               {"edge": "officeIs", "dir": "out", "node": "office"},
               {"edge": "locatedIn", "dir": "out", "node": "place"}]}
  ])");
}

}  // namespace

PlantedCorpus GeneratePlantedCorpus(const PlantedCorpusConfig &config, std::uint64_t seed) {
  if (config.planted > config.figures || config.planted_postings > config.postings_per_figure ||
      config.offices < 2 || config.places < 2 || config.window_lo > config.window_hi) {
    throw Error(ErrorCode::kInvalidArgument, "inconsistent planted corpus configuration");
  }
  Rng rng(StreamSeed(seed, "planted-corpus"));
  PlantedCorpus corpus;
  corpus.schema = PlantedSchema();
  corpus.templates = PlantedTemplates();
  corpus.walk.walks_per_figure_per_template = config.walks_per_figure;

  auto add = [&](const char *table, Json row) { corpus.records.push_back(Record{table, std::move(row)}); };

  // Place 0 and office 0 are reserved for the cohort.
  for (std::size_t p = 0; p < config.places; ++p) {
    add("place", {{"id", NumberedId("L", p)}, {"name", "Place " + std::to_string(p)}});
  }
  for (std::size_t o = 0; o < config.offices; ++o) {
    const std::size_t place = o == 0 ? 0 : 1 + rng.UniformIndex(config.places - 1);
    add("office", {{"id", NumberedId("O", o)}, {"name", "Office " + std::to_string(o)}, {"place", NumberedId("L", place)}});
  }

  std::vector<bool> is_planted(config.figures, false);
  for (std::size_t i : rng.SampleWithoutReplacement(config.figures, config.planted)) is_planted[i] = true;

  auto noise_year = [&]() {
    for (;;) {
      const auto span = static_cast<std::size_t>(config.year_hi - config.year_lo + 1);
      const std::int64_t y = config.year_lo + static_cast<std::int64_t>(rng.UniformIndex(span));
      if (y < config.window_lo - config.guard_years || y > config.window_hi + config.guard_years) return y;
    }
  };
  const auto window = static_cast<std::size_t>(config.window_hi - config.window_lo + 1);

  std::size_t posting_id = 0;
  for (std::size_t f = 0; f < config.figures; ++f) {
    const std::string fig = NumberedId("P", f);
    corpus.figures.push_back(fig);
    if (is_planted[f]) corpus.planted.push_back(fig);
    add("person", {{"id", fig}, {"name", "Person " + std::to_string(f)}});
    for (std::size_t k = 0; k < config.postings_per_figure; ++k) {
      const bool in_cohort = is_planted[f] && k < config.planted_postings;
      const std::size_t office = in_cohort ? 0 : 1 + rng.UniformIndex(config.offices - 1);
      const std::int64_t year =
          in_cohort ? config.window_lo + static_cast<std::int64_t>(rng.UniformIndex(window)) : noise_year();
      add("posting", {{"id", NumberedId("E", posting_id)},
                      {"title", "posting " + std::to_string(posting_id)},
                      {"year", year},
                      {"person", fig},
                      {"office", NumberedId("O", office)}});
      ++posting_id;
    }
  }

  const Atom time = Atom::TimeRange(config.window_lo, config.window_hi);
  const Atom place = Atom::Of(FeatureKind::kLocation, NumberedId("L", 0));
  const Atom office = Atom::Of(FeatureKind::kAffiliation, NumberedId("O", 0));
  corpus.planted_features = {Feature::Atomic(time), Feature::Atomic(place), Feature::Atomic(office),
                             Feature::Composite({office, time}), Feature::Composite({place, time})};
  return corpus;
}

PlantedTrial RunPlantedTrial(const PlantedCorpusConfig &config, std::uint64_t seed, std::size_t seed_positives) {
  const PlantedCorpus planted = GeneratePlantedCorpus(config, seed);
  SchemaMapping schema = SchemaMapping::FromJson(planted.schema);
  IngestResult ingested = IngestGraph(schema, planted.records);
  const Corpus corpus =
      Corpus::Build(std::move(schema), std::move(ingested.graph), planted.templates, planted.walk, seed);

  PlantedTrial trial;
  trial.seed = seed;
  trial.planted_min_frequency = 1.0;
  for (const auto &f : planted.planted_features) {
    for (const auto &fig : corpus.figures) {
      const double v = Frequency(f, fig, corpus.store).value_or(0.0);
      if (std::binary_search(planted.planted.begin(), planted.planted.end(), fig)) {
        trial.planted_min_frequency = std::min(trial.planted_min_frequency, v);
      } else {
        trial.noise_max_frequency = std::max(trial.noise_max_frequency, v);
      }
    }
  }

  Rng rng(StreamSeed(seed, "seed-positives"));
  std::vector<std::string> positives;
  for (std::size_t i : rng.SampleWithoutReplacement(planted.planted.size(), seed_positives)) {
    positives.push_back(planted.planted[i]);
  }
  IdentifyConfig cfg = IdentifyConfig::FromJson(Json{{"seed", seed}});
  cfg.positives = positives;
  Session session("bench", corpus, [] { return std::string(); });
  const SessionIteration &it = session.Identify(corpus.figures, cfg);

  for (const auto &fig : it.Included()) {
    ++trial.included;
    if (std::binary_search(planted.planted.begin(), planted.planted.end(), fig)) ++trial.true_positives;
  }
  trial.precision = trial.included ? static_cast<double>(trial.true_positives) / trial.included : 0.0;
  trial.recall = planted.planted.empty() ? 0.0 : static_cast<double>(trial.true_positives) / planted.planted.size();
  trial.concept_features = it.model.group.features;
  return trial;
}

}  // namespace cohort
