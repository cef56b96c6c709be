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
#ifndef COHORT_WALKER_HPP_
#define COHORT_WALKER_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohort/graph.hpp"

namespace cohort {

struct TemplateStep {
  TypeIndex edge_type = 0;
  Direction dir = Direction::kOut;
  TypeIndex node_type = 0;
};

// A typed walk pattern anchored at a figure. Path position 0 is the anchor;
// step i (1-based) moves from position i-1 to position i.
struct MetaPathTemplate {
  std::string id;
  TypeIndex anchor = 0;
  std::vector<TemplateStep> steps;
  // "{i}" expands to the label of path position i, "{i.attr}" to one of its
  // attributes.
  std::string render;
};

// Template document grammar (JSON array):
//   [{"id": str, "anchor": node-type, "render": str,
//     "steps": [{"edge": edge-type, "dir": "out"|"in", "node": node-type}, ...]}]
// Throws Error(kUnknownType) or Error(kIncompatibleStep) carrying the step.
std::vector<MetaPathTemplate> CompileTemplates(const Json &defs, const TypeRegistry &types);

struct RelationToken {
  std::string type;
  std::string source;
  std::string target;
  auto operator<=>(const RelationToken &) const = default;
};

// Slot values pulled out of a walk; multiset semantics.
struct DescriptionTokens {
  std::vector<std::int64_t> years;
  std::vector<std::string> locations;
  std::vector<std::string> offices;
  std::vector<std::string> co_figures;
  std::vector<std::string> entities;
  std::vector<RelationToken> relationships;
};

struct Description {
  std::string id;
  std::string figure;
  std::string template_id;
  std::vector<std::string> nodes;  // path positions, anchor first
  std::vector<std::string> edges;  // one per step
  DescriptionTokens tokens;
};

// Descriptions grouped by anchor figure. Immutable once generation completes.
class DescriptionStore {
 public:
  void Add(Description d);

  std::span<const Description> For(std::string_view figure) const;
  // N_d: number of stored descriptions anchored at `figure`.
  std::size_t CountFor(std::string_view figure) const { return For(figure).size(); }
  std::size_t size() const { return size_; }
  const std::map<std::string, std::vector<Description>, std::less<>> &by_figure() const { return by_figure_; }

  // One description per line, stable field order.
  void WriteJsonl(std::ostream &out) const;
  static DescriptionStore ReadJsonl(std::istream &in);

 private:
  std::map<std::string, std::vector<Description>, std::less<>> by_figure_;
  std::size_t size_ = 0;
};

OrderedJson DescriptionToJson(const Description &d);
Description DescriptionFromJson(const Json &j);

struct WalkConfig {
  int walks_per_figure_per_template = 8;
  int max_retries = 3;
  unsigned threads = 1;
};

// Anchored uniform meta-path walks: at every step the next node is drawn
// uniformly among neighbors reachable through the step's edge type that have
// the step's node type. Dead ends are retried up to max_retries times.
DescriptionStore GenerateDescriptions(const KnowledgeGraph &graph,
                                      std::span<const MetaPathTemplate> templates,
                                      const WalkConfig &config, std::uint64_t seed);

DescriptionTokens ExtractTokens(const KnowledgeGraph &graph, std::span<const std::size_t> nodes,
                                std::span<const std::size_t> edges);

std::string RenderDescription(const KnowledgeGraph &graph, const MetaPathTemplate &tmpl,
                              const Description &d);

}  // namespace cohort

#endif  // COHORT_WALKER_HPP_
