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
#ifndef COHORT_TESTS_SUPPORT_HPP_
#define COHORT_TESTS_SUPPORT_HPP_

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cohort/api.hpp"
#include "cohort/graph.hpp"
#include "cohort/walker.hpp"

namespace cohort::testing {

inline std::string FixturePath(std::string_view name) {
  return std::string(COHORT_FIXTURE_DIR) + "/" + std::string(name);
}

inline std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json ReadJsonFixture(std::string_view name) { return Json::parse(ReadFile(FixturePath(name))); }

inline std::vector<Record> TangRecords() {
  std::ifstream in(FixturePath("tang.jsonl"));
  return ReadRecords(in);
}

inline SchemaMapping TangSchema() { return SchemaMapping::FromJson(ReadJsonFixture("tang_schema.json")); }

inline KnowledgeGraph TangGraph() {
  const auto records = TangRecords();
  return IngestGraph(TangSchema(), records).graph;
}

inline CorpusFiles TangFiles() {
  return {FixturePath("tang.jsonl"), FixturePath("tang_schema.json"), FixturePath("tang_templates.json"),
          FixturePath("tang_aliases.json")};
}

inline WalkConfig TangWalk() {
  WalkConfig w;
  w.walks_per_figure_per_template = 8;
  return w;
}

inline constexpr std::uint64_t kTangSeed = 7;

// 96 gatherings in 710-712 plus dated distractors and undated events.
inline KnowledgeGraph TimelineGraph() {
  std::ifstream in(FixturePath("timeline96.jsonl"));
  const auto records = ReadRecords(in);
  return IngestGraph(TangSchema(), records).graph;
}

inline Corpus TangCorpus() { return LoadCorpus(TangFiles(), TangWalk(), kTangSeed).corpus; }

// Description carrying only slot tokens; ids are generated per figure.
inline Description Desc(std::string figure, DescriptionTokens tokens) {
  static std::size_t counter = 0;
  Description d;
  d.id = figure + "#" + std::to_string(counter++);
  d.figure = std::move(figure);
  d.template_id = "t";
  d.tokens = std::move(tokens);
  return d;
}

inline DescriptionTokens Years(std::vector<std::int64_t> years) {
  DescriptionTokens t;
  t.years = std::move(years);
  return t;
}

inline DescriptionTokens Places(std::vector<std::string> places) {
  DescriptionTokens t;
  t.locations = std::move(places);
  return t;
}

}  // namespace cohort::testing

#endif  // COHORT_TESTS_SUPPORT_HPP_
