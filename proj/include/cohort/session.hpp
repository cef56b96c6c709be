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
#ifndef COHORT_SESSION_HPP_
#define COHORT_SESSION_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohort/expression.hpp"
#include "cohort/extract.hpp"
#include "cohort/fusion.hpp"
#include "cohort/graph.hpp"
#include "cohort/selection.hpp"
#include "cohort/walker.hpp"

namespace cohort {

// Everything a session reads: the graph, its schema, the templates and the
// description store generated once at load time.
struct Corpus {
  SchemaMapping schema;
  KnowledgeGraph graph;
  std::vector<MetaPathTemplate> templates;
  DescriptionStore store;
  std::vector<std::string> figures;  // sorted ids of figure-kind nodes
  // NFC-normalized display name or alias -> figure ids.
  std::map<std::string, std::vector<std::string>, std::less<>> names;

  static Corpus Build(SchemaMapping schema, KnowledgeGraph graph, const Json &templates, const WalkConfig &walk,
                      std::uint64_t seed);
  // Alias document: {"<alias>": "<figure id>" | ["<id>", ...]}.
  void AddAliases(const Json &aliases);
  const Node &Figure(std::string_view id) const;  // throws Error(kUnknownFigure)
};

std::string NormalizeNfc(std::string_view text);

enum class CompareOp { kEq, kNe, kLt, kLe, kGt, kGe };

struct Predicate {
  std::string attr;
  CompareOp op = CompareOp::kEq;
  Json value;  // string or number
};

struct ScopeQuery {
  enum class Mode { kFigures, kEgoNetwork, kCondition, kExpression };

  Mode mode = Mode::kFigures;
  std::vector<std::string> names;        // figures
  std::string core;                      // ego_network: id or name
  int hops = 1;                          // ego_network
  std::vector<std::string> edge_types;   // ego_network; empty = all
  std::vector<Predicate> predicates;     // condition
  std::string text;                      // expression
  std::optional<Expr> expression;        // expression, parsed

  static ScopeQuery FromJson(const Json &j);  // parses expressions eagerly
  OrderedJson ToJson() const;
};

// Sorted, deduplicated figure ids. Throws Error(kUnknownFigure) for unmatched
// names in figures / ego_network mode.
std::vector<std::string> ResolveScope(const Corpus &corpus, const ScopeQuery &query);

struct IdentifyConfig {
  std::uint64_t seed = 0;
  // Training positives; the whole scope when absent.
  std::optional<std::vector<std::string>> positives;
  ExtractionParams extraction;
  GAConfig ga;
  TrainConfig train;
  std::size_t group = 0;  // which GA group becomes the concept
  Thresholds thresholds;

  // The seed fans out to ga.seed and train.seed unless those are given.
  static IdentifyConfig FromJson(const Json &j);
  OrderedJson ToJson() const;
};

struct ManualEdit {
  std::string figure;
  Status from = Status::kExcluded;
  Status to = Status::kExcluded;
  std::string timestamp;
};

struct IterationSummary {
  std::size_t total_figures = 0;
  std::size_t included = 0;
  std::size_t candidates = 0;
  std::size_t changed_figures = 0;  // status differences vs the previous iteration
  std::vector<std::string> feature_list;
};

struct CandidateFeature {
  std::string id;
  FeatureKind kind = FeatureKind::kLocation;
  std::size_t support = 0;  // scope figures with a matching description
};

struct SessionIteration {
  std::size_t index = 0;
  std::string origin;  // identify | update | revert
  std::optional<std::size_t> reverted_from;
  IdentifyConfig config;
  std::vector<std::string> scope;
  std::vector<std::string> positives;
  std::vector<CandidateFeature> features;
  std::vector<FeatureGroup> groups;
  std::size_t selected_group = 0;
  Concept model;
  CohortAssignment assignment;
  std::vector<ManualEdit> manual_edits;
  IterationSummary summary;

  const FigureAssignment *Find(std::string_view figure) const;
  std::vector<std::string> Included() const;
  OrderedJson ToJson() const;
  static SessionIteration FromJson(const Json &j);
};

// Label:   {"type": "label", "figure": id, "status": "included"|"candidate"|"excluded"}
// Replace: {"type": "replace", "feature": id, "with": id}
// Weight:  {"type": "weight", "feature": id, "weight": number}
// Retrain: {"type": "retrain"}
struct EditOp {
  enum class Type { kLabel, kReplace, kWeight, kRetrain };
  Type type = Type::kLabel;
  std::string figure;
  Status status = Status::kExcluded;
  std::string feature;
  std::string with;
  double weight = 0.0;

  static std::vector<EditOp> ListFromJson(const Json &j);
  OrderedJson ToJson() const;
};

using Clock = std::function<std::string()>;
std::string UtcNow();

// One analysis session. Not thread-safe: callers serialize mutations.
class Session {
 public:
  Session(std::string id, const Corpus &corpus, Clock clock = UtcNow);

  const std::string &id() const { return id_; }
  const Corpus &corpus() const { return *corpus_; }
  bool empty() const { return iterations_.empty(); }
  std::size_t size() const { return iterations_.size(); }
  std::size_t current() const;  // throws Error(kUnknownIteration) when empty
  const SessionIteration &iteration(std::size_t index) const;
  std::span<const SessionIteration> iterations() const { return iterations_; }

  const SessionIteration &Identify(std::vector<std::string> scope, const IdentifyConfig &config);
  const SessionIteration &ApplyEdits(std::span<const EditOp> edits);
  // Retrains from the current iteration's included figures.
  const SessionIteration &Update();
  const SessionIteration &Revert(std::size_t index);

  std::string ExportCsv(std::size_t index) const;

  // Replaces or appends a stored iteration (log replay).
  void Restore(SessionIteration it);

 private:
  SessionIteration RunPipeline(std::vector<std::string> scope, std::vector<std::string> positives,
                               const IdentifyConfig &config) const;
  void Finish(SessionIteration &it) const;

  std::string id_;
  const Corpus *corpus_;
  Clock clock_;
  std::vector<SessionIteration> iterations_;
};

// Support counts of the concept features over the iteration scope.
std::vector<std::size_t> ConceptSupport(const SessionIteration &it, const DescriptionStore &store);

}  // namespace cohort

#endif  // COHORT_SESSION_HPP_
