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
#include "cohort/session.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <deque>
#include <set>

#include "cohort/error.hpp"

namespace cohort {

namespace {

std::vector<std::string> SortedUnique(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

template <typename F>
auto Staged(const char *stage, F &&fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (Error &e) {
    if (!e.stage()) e.WithStage(stage);
    throw;
  }
}

Error Invalid(const std::string &msg) { return Error(ErrorCode::kInvalidArgument, msg); }

std::string_view ModeName(ScopeQuery::Mode m) {
  switch (m) {
    case ScopeQuery::Mode::kFigures:
      return "figures";
    case ScopeQuery::Mode::kEgoNetwork:
      return "ego_network";
    case ScopeQuery::Mode::kCondition:
      return "condition";
    case ScopeQuery::Mode::kExpression:
      return "expression";
  }
  return "figures";
}

constexpr std::pair<CompareOp, std::string_view> kOps[] = {
    {CompareOp::kEq, "eq"}, {CompareOp::kNe, "ne"}, {CompareOp::kLt, "lt"},
    {CompareOp::kLe, "le"}, {CompareOp::kGt, "gt"}, {CompareOp::kGe, "ge"},
};

template <typename T>
bool Compare(const T &a, const T &b, CompareOp op) {
  switch (op) {
    case CompareOp::kEq:
      return a == b;
    case CompareOp::kNe:
      return a != b;
    case CompareOp::kLt:
      return a < b;
    case CompareOp::kLe:
      return a <= b;
    case CompareOp::kGt:
      return a > b;
    case CompareOp::kGe:
      return a >= b;
  }
  return false;
}

bool Satisfies(const Node &node, const Predicate &p) {
  auto it = node.attrs.find(p.attr);
  if (it == node.attrs.end()) return false;
  const AttrValue &v = it->second;
  if (const auto *s = std::get_if<std::string>(&v)) {
    if (p.value.is_string()) return Compare(NormalizeNfc(*s), NormalizeNfc(p.value.get<std::string>()), p.op);
    return false;
  }
  std::optional<std::int64_t> n;
  if (const auto *i = std::get_if<std::int64_t>(&v)) n = *i;
  if (const auto *y = std::get_if<Year>(&v)) n = y->value;
  if (!n || !p.value.is_number()) return false;
  return Compare(static_cast<double>(*n), p.value.get<double>(), p.op);
}

std::vector<std::string> MatchFigureName(const Corpus &corpus, std::string_view name) {
  if (auto idx = corpus.graph.FindNode(name)) {
    const Node &n = corpus.graph.node(*idx);
    if (corpus.graph.TypeOf(n).kind == NodeKind::kFigure) return {n.id};
  }
  auto it = corpus.names.find(NormalizeNfc(name));
  if (it == corpus.names.end()) {
    throw Error(ErrorCode::kUnknownFigure, "no figure named '" + std::string(name) + "'");
  }
  return it->second;
}

Json ParamsToJson(const ExtractionParams &p) {
  return Json{{"time_range",
               {{"eps_years", p.time_range.eps_years},
                {"min_pts", p.time_range.min_pts},
                {"occurrence_ratio", p.time_range.occurrence_ratio}}},
              {"top_k", p.top_k},
              {"relationship",
               {{"min_community", p.relationship.min_community}, {"directed_scc", p.relationship.directed_scc}}},
              {"celebrity_link_ratio", p.celebrity_link_ratio},
              {"entity_link_ratio", p.entity_link_ratio},
              {"compose",
               {{"min_joint_support_ratio", p.compose.min_joint_support_ratio},
                {"max_arity", p.compose.max_arity},
                {"max_output", p.compose.max_output}}}};
}

ExtractionParams ParamsFromJson(const Json &j) {
  ExtractionParams p;
  if (j.is_null()) return p;
  const Json tr = j.value("time_range", Json::object());
  p.time_range.eps_years = tr.value("eps_years", p.time_range.eps_years);
  p.time_range.min_pts = tr.value("min_pts", p.time_range.min_pts);
  p.time_range.occurrence_ratio = tr.value("occurrence_ratio", p.time_range.occurrence_ratio);
  p.top_k = j.value("top_k", p.top_k);
  const Json rel = j.value("relationship", Json::object());
  p.relationship.min_community = rel.value("min_community", p.relationship.min_community);
  p.relationship.directed_scc = rel.value("directed_scc", p.relationship.directed_scc);
  p.celebrity_link_ratio = j.value("celebrity_link_ratio", p.celebrity_link_ratio);
  p.entity_link_ratio = j.value("entity_link_ratio", p.entity_link_ratio);
  const Json comp = j.value("compose", Json::object());
  p.compose.min_joint_support_ratio = comp.value("min_joint_support_ratio", p.compose.min_joint_support_ratio);
  p.compose.max_arity = comp.value("max_arity", p.compose.max_arity);
  p.compose.max_output = comp.value("max_output", p.compose.max_output);
  if (p.time_range.eps_years < 0 || p.time_range.min_pts == 0 || p.compose.max_arity < 2 ||
      p.compose.max_arity > 3) {
    throw Invalid("extraction parameters out of range");
  }
  return p;
}

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::size_t CountChanged(const CohortAssignment &prev, const CohortAssignment &next) {
  std::map<std::string_view, Status> before;
  for (const auto &a : prev) before.emplace(a.figure, a.status);
  std::size_t changed = 0;
  for (const auto &a : next) {
    auto it = before.find(a.figure);
    if (it == before.end() || it->second != a.status) ++changed;
    if (it != before.end()) before.erase(it);
  }
  return changed + before.size();
}

}  // namespace

std::string NormalizeNfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kInvalidArgument, "NFC normalizer unavailable");
  const auto src = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString out = nfc->normalize(src, status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kInvalidArgument, "text is not valid UTF-8");
  std::string utf8;
  out.toUTF8String(utf8);
  return utf8;
}

Corpus Corpus::Build(SchemaMapping schema, KnowledgeGraph graph, const Json &templates, const WalkConfig &walk,
                     std::uint64_t seed) {
  Corpus c;
  c.schema = std::move(schema);
  c.graph = std::move(graph);
  c.templates = CompileTemplates(templates, c.graph.types());
  c.store = GenerateDescriptions(c.graph, c.templates, walk, seed);
  for (std::size_t i : c.graph.NodesOfKind(NodeKind::kFigure)) {
    const Node &n = c.graph.node(i);
    c.figures.push_back(n.id);
    c.names[NormalizeNfc(n.label)].push_back(n.id);
  }
  std::sort(c.figures.begin(), c.figures.end());
  for (auto &[name, ids] : c.names) ids = SortedUnique(std::move(ids));
  return c;
}

void Corpus::AddAliases(const Json &aliases) {
  if (!aliases.is_object()) throw Invalid("alias table must be a JSON object");
  for (const auto &[alias, target] : aliases.items()) {
    std::vector<std::string> ids = target.is_array() ? target.get<std::vector<std::string>>()
                                                     : std::vector<std::string>{target.get<std::string>()};
    for (const auto &id : ids) Figure(id);
    auto &slot = names[NormalizeNfc(alias)];
    slot.insert(slot.end(), ids.begin(), ids.end());
    slot = SortedUnique(std::move(slot));
  }
}

const Node &Corpus::Figure(std::string_view id) const {
  auto idx = graph.FindNode(id);
  if (!idx || graph.TypeOf(graph.node(*idx)).kind != NodeKind::kFigure) {
    throw Error(ErrorCode::kUnknownFigure, "unknown figure '" + std::string(id) + "'");
  }
  return graph.node(*idx);
}

ScopeQuery ScopeQuery::FromJson(const Json &j) {
  ScopeQuery q;
  try {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "figures") {
      q.mode = Mode::kFigures;
      q.names = j.at("names").get<std::vector<std::string>>();
    } else if (mode == "ego_network") {
      q.mode = Mode::kEgoNetwork;
      q.core = j.at("core").get<std::string>();
      q.hops = j.value("hops", 1);
      q.edge_types = j.value("edge_types", std::vector<std::string>{});
      if (q.hops < 1) throw Invalid("hops must be >= 1");
    } else if (mode == "condition") {
      q.mode = Mode::kCondition;
      for (const auto &pj : j.at("predicates")) {
        Predicate p;
        p.attr = pj.at("attr").get<std::string>();
        const std::string op = pj.value("op", "eq");
        auto it = std::find_if(std::begin(kOps), std::end(kOps), [&](const auto &e) { return e.second == op; });
        if (it == std::end(kOps)) throw Invalid("unknown comparison '" + op + "'");
        p.op = it->first;
        p.value = pj.at("value");
        if (!p.value.is_string() && !p.value.is_number()) throw Invalid("predicate value must be a string or number");
        q.predicates.push_back(std::move(p));
      }
    } else if (mode == "expression") {
      q.mode = Mode::kExpression;
      q.text = j.at("expression").get<std::string>();
      q.expression = ParseExpression(q.text);
    } else {
      throw Invalid("unknown scope mode '" + mode + "'");
    }
  } catch (const Json::exception &e) {
    throw Invalid(std::string("malformed scope query: ") + e.what());
  }
  return q;
}

OrderedJson ScopeQuery::ToJson() const {
  OrderedJson j;
  j["mode"] = ModeName(mode);
  switch (mode) {
    case Mode::kFigures:
      j["names"] = names;
      break;
    case Mode::kEgoNetwork:
      j["core"] = core;
      j["hops"] = hops;
      j["edge_types"] = edge_types;
      break;
    case Mode::kCondition:
      j["predicates"] = OrderedJson::array();
      for (const auto &p : predicates) {
        auto it = std::find_if(std::begin(kOps), std::end(kOps), [&](const auto &e) { return e.first == p.op; });
        j["predicates"].push_back(OrderedJson{{"attr", p.attr}, {"op", it->second}, {"value", p.value}});
      }
      break;
    case Mode::kExpression:
      j["expression"] = expression ? PrintExpression(*expression) : text;
      break;
  }
  return j;
}

std::vector<std::string> ResolveScope(const Corpus &corpus, const ScopeQuery &query) {
  const KnowledgeGraph &g = corpus.graph;
  std::vector<std::string> out;
  switch (query.mode) {
    case ScopeQuery::Mode::kFigures:
      for (const auto &name : query.names) {
        auto ids = MatchFigureName(corpus, name);
        out.insert(out.end(), ids.begin(), ids.end());
      }
      break;
    case ScopeQuery::Mode::kEgoNetwork: {
      std::vector<TypeIndex> allowed;
      for (const auto &name : query.edge_types) {
        auto t = g.types().FindEdgeType(name);
        if (!t) throw Error(ErrorCode::kUnknownType, "unknown edge type '" + name + "'");
        allowed.push_back(*t);
      }
      std::vector<int> depth(g.node_count(), -1);
      std::deque<std::size_t> queue;
      for (const auto &id : MatchFigureName(corpus, query.core)) {
        const std::size_t start = g.NodeIndex(id);
        depth[start] = 0;
        queue.push_back(start);
      }
      while (!queue.empty()) {
        const std::size_t n = queue.front();
        queue.pop_front();
        if (g.TypeOf(g.node(n)).kind == NodeKind::kFigure) out.push_back(g.node(n).id);
        if (depth[n] == query.hops) continue;
        for (const Neighbor &nb : g.Neighbors(g.node(n).id, std::nullopt, Direction::kBoth)) {
          if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), nb.edge->type) == allowed.end()) continue;
          const std::size_t m = g.NodeIndex(nb.node->id);
          if (depth[m] >= 0) continue;
          depth[m] = depth[n] + 1;
          queue.push_back(m);
        }
      }
      break;
    }
    case ScopeQuery::Mode::kCondition:
      for (const auto &id : corpus.figures) {
        const Node &n = corpus.Figure(id);
        if (std::all_of(query.predicates.begin(), query.predicates.end(),
                        [&](const Predicate &p) { return Satisfies(n, p); })) {
          out.push_back(id);
        }
      }
      break;
    case ScopeQuery::Mode::kExpression: {
      const Expr e = query.expression ? *query.expression : ParseExpression(query.text);
      for (const auto &id : corpus.figures) {
        if (MatchesFigure(e, id, corpus.store)) out.push_back(id);
      }
      break;
    }
  }
  return SortedUnique(std::move(out));
}

IdentifyConfig IdentifyConfig::FromJson(const Json &j) {
  IdentifyConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw Invalid("identify config must be a JSON object");
  try {
    c.seed = j.value("seed", c.seed);
    if (j.contains("positives")) c.positives = j.at("positives").get<std::vector<std::string>>();
    c.extraction = ParamsFromJson(j.value("extraction", Json()));
    GAConfig ga_defaults;
    ga_defaults.seed = c.seed;
    c.ga = GAConfig::FromJson(j.value("ga", Json()), ga_defaults);
    TrainConfig train_defaults;
    train_defaults.seed = c.seed;
    c.train = TrainConfig::FromJson(j.value("train", Json()), train_defaults);
    c.group = j.value("group", c.group);
  } catch (const Json::exception &e) {
    throw Invalid(std::string("malformed identify config: ") + e.what());
  }
  return c;
}

OrderedJson IdentifyConfig::ToJson() const {
  OrderedJson j;
  j["seed"] = seed;
  if (positives) j["positives"] = *positives;
  j["extraction"] = ParamsToJson(extraction);
  j["ga"] = ga.ToJson();
  j["train"] = train.ToJson();
  j["group"] = group;
  return j;
}

const FigureAssignment *SessionIteration::Find(std::string_view figure) const {
  auto it = std::lower_bound(assignment.begin(), assignment.end(), figure,
                             [](const FigureAssignment &a, std::string_view f) { return a.figure < f; });
  return it != assignment.end() && it->figure == figure ? &*it : nullptr;
}

std::vector<std::string> SessionIteration::Included() const {
  std::vector<std::string> out;
  for (const auto &a : assignment) {
    if (a.status == Status::kIncluded) out.push_back(a.figure);
  }
  return out;
}

OrderedJson SessionIteration::ToJson() const {
  OrderedJson j;
  j["index"] = index;
  j["origin"] = origin;
  if (reverted_from) j["reverted_from"] = *reverted_from;
  j["config"] = config.ToJson();
  j["scope"] = scope;
  j["positives"] = positives;
  j["features"] = OrderedJson::array();
  for (const auto &f : features) {
    j["features"].push_back(OrderedJson{{"id", f.id}, {"kind", FeatureKindName(f.kind)}, {"support", f.support}});
  }
  j["groups"] = OrderedJson::array();
  for (const auto &g : groups) j["groups"].push_back(g.ToJson());
  j["selected_group"] = selected_group;
  j["concept"] = model.ToJson();
  j["assignment"] = OrderedJson::array();
  for (const auto &a : assignment) {
    OrderedJson aj{{"figure", a.figure},
                   {"score", a.score},
                   {"status", StatusName(a.status)},
                   {"origin", OriginName(a.origin)}};
    if (a.zero_descriptions) aj["zero_descriptions"] = true;
    j["assignment"].push_back(std::move(aj));
  }
  j["manual_edits"] = OrderedJson::array();
  for (const auto &e : manual_edits) {
    j["manual_edits"].push_back(OrderedJson{
        {"figure", e.figure}, {"from", StatusName(e.from)}, {"to", StatusName(e.to)}, {"timestamp", e.timestamp}});
  }
  j["summary"] = OrderedJson{{"total_figures", summary.total_figures},
                             {"included", summary.included},
                             {"candidates", summary.candidates},
                             {"changed_figures", summary.changed_figures},
                             {"feature_list", summary.feature_list}};
  return j;
}

SessionIteration SessionIteration::FromJson(const Json &j) {
  SessionIteration it;
  it.index = j.at("index").get<std::size_t>();
  it.origin = j.at("origin").get<std::string>();
  if (j.contains("reverted_from")) it.reverted_from = j.at("reverted_from").get<std::size_t>();
  it.config = IdentifyConfig::FromJson(j.at("config"));
  it.scope = j.at("scope").get<std::vector<std::string>>();
  it.positives = j.at("positives").get<std::vector<std::string>>();
  for (const auto &f : j.at("features")) {
    const Feature parsed = ParseFeature(f.at("id").get<std::string>());
    it.features.push_back(CandidateFeature{parsed.id(), parsed.kind(), f.at("support").get<std::size_t>()});
  }
  for (const auto &g : j.at("groups")) it.groups.push_back(FeatureGroup::FromJson(g));
  it.selected_group = j.at("selected_group").get<std::size_t>();
  it.model = Concept::FromJson(j.at("concept"));
  for (const auto &aj : j.at("assignment")) {
    FigureAssignment a;
    a.figure = aj.at("figure").get<std::string>();
    a.score = aj.at("score").get<double>();
    a.status = StatusFromName(aj.at("status").get<std::string>());
    a.origin = OriginFromName(aj.at("origin").get<std::string>());
    a.zero_descriptions = aj.value("zero_descriptions", false);
    it.assignment.push_back(std::move(a));
  }
  for (const auto &ej : j.at("manual_edits")) {
    it.manual_edits.push_back(ManualEdit{ej.at("figure").get<std::string>(),
                                         StatusFromName(ej.at("from").get<std::string>()),
                                         StatusFromName(ej.at("to").get<std::string>()),
                                         ej.at("timestamp").get<std::string>()});
  }
  const auto &s = j.at("summary");
  it.summary.total_figures = s.at("total_figures").get<std::size_t>();
  it.summary.included = s.at("included").get<std::size_t>();
  it.summary.candidates = s.at("candidates").get<std::size_t>();
  it.summary.changed_figures = s.at("changed_figures").get<std::size_t>();
  it.summary.feature_list = s.at("feature_list").get<std::vector<std::string>>();
  return it;
}

std::vector<EditOp> EditOp::ListFromJson(const Json &j) {
  const Json &list = j.is_object() && j.contains("edits") ? j.at("edits") : j;
  if (!list.is_array()) throw Invalid("edits must be a JSON array");
  std::vector<EditOp> out;
  try {
    for (const auto &e : list) {
      EditOp op;
      const std::string type = e.at("type").get<std::string>();
      if (type == "label") {
        op.type = Type::kLabel;
        op.figure = e.at("figure").get<std::string>();
        op.status = StatusFromName(e.at("status").get<std::string>());
      } else if (type == "replace") {
        op.type = Type::kReplace;
        op.feature = e.at("feature").get<std::string>();
        op.with = e.at("with").get<std::string>();
      } else if (type == "weight") {
        op.type = Type::kWeight;
        op.feature = e.at("feature").get<std::string>();
        op.weight = e.at("weight").get<double>();
        if (!std::isfinite(op.weight)) throw Invalid("weight must be finite");
      } else if (type == "retrain") {
        op.type = Type::kRetrain;
      } else {
        throw Invalid("unknown edit type '" + type + "'");
      }
      out.push_back(std::move(op));
    }
  } catch (const Json::exception &e) {
    throw Invalid(std::string("malformed edit: ") + e.what());
  }
  return out;
}

OrderedJson EditOp::ToJson() const {
  switch (type) {
    case Type::kLabel:
      return OrderedJson{{"type", "label"}, {"figure", figure}, {"status", StatusName(status)}};
    case Type::kReplace:
      return OrderedJson{{"type", "replace"}, {"feature", feature}, {"with", with}};
    case Type::kWeight:
      return OrderedJson{{"type", "weight"}, {"feature", feature}, {"weight", weight}};
    case Type::kRetrain:
      return OrderedJson{{"type", "retrain"}};
  }
  return OrderedJson();
}

std::string UtcNow() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Session::Session(std::string id, const Corpus &corpus, Clock clock)
    : id_(std::move(id)), corpus_(&corpus), clock_(std::move(clock)) {}

std::size_t Session::current() const {
  if (iterations_.empty()) throw Error(ErrorCode::kUnknownIteration, "session " + id_ + " has no iterations");
  return iterations_.size() - 1;
}

const SessionIteration &Session::iteration(std::size_t index) const {
  if (index >= iterations_.size()) {
    throw Error(ErrorCode::kUnknownIteration, "session " + id_ + " has no iteration " + std::to_string(index));
  }
  return iterations_[index];
}

SessionIteration Session::RunPipeline(std::vector<std::string> scope, std::vector<std::string> positives,
                                      const IdentifyConfig &config) const {
  const DescriptionStore &store = corpus_->store;
  SessionIteration it;
  it.config = config;
  it.scope = SortedUnique(std::move(scope));
  it.positives = SortedUnique(std::move(positives));
  if (it.scope.empty()) throw Invalid("scope is empty");
  Staged("train", [&] {
    if (it.positives.size() < 2) {
      throw Error(ErrorCode::kTooFewPositives,
                  "training needs at least 2 positive figures, got " + std::to_string(it.positives.size()));
    }
    if (!std::includes(it.scope.begin(), it.scope.end(), it.positives.begin(), it.positives.end())) {
      throw Invalid("positives must be a subset of the scope");
    }
  });

  const auto extracted = Staged("extract", [&] { return ExtractAll(store, it.positives, config.extraction).All(); });

  std::vector<Feature> kept;
  std::vector<std::vector<std::size_t>> supports;
  for (const auto &f : extracted) {
    std::vector<std::size_t> members;
    for (std::size_t u = 0; u < it.scope.size(); ++u) {
      const auto descs = store.For(it.scope[u]);
      if (std::any_of(descs.begin(), descs.end(), [&](const Description &d) { return Matches(f, d); })) {
        members.push_back(u);
      }
    }
    if (members.empty()) continue;
    it.features.push_back(CandidateFeature{f.id(), f.kind(), members.size()});
    kept.push_back(f);
    supports.push_back(std::move(members));
  }

  const FeatureSet set(kept, std::move(supports), it.scope.size());
  it.groups = Staged("select", [&] { return SelectFeatureGroups(set, config.ga).groups; });
  if (config.group >= it.groups.size()) {
    throw Invalid("group " + std::to_string(config.group) + " not among the " + std::to_string(it.groups.size()) +
                  " selected groups")
        .WithStage("select");
  }
  it.selected_group = config.group;
  const FeatureGroup &group = it.groups[config.group];
  it.model = Staged("train", [&] {
    return TrainConcept(group, ResolveGroup(group, kept), it.positives, it.scope, store, config.train);
  });
  it.assignment = Staged("classify", [&] { return Classify(it.model, it.scope, store, config.thresholds); });
  return it;
}

void Session::Finish(SessionIteration &it) const {
  it.summary = IterationSummary{};
  it.summary.total_figures = it.scope.size();
  for (const auto &a : it.assignment) {
    if (a.status == Status::kIncluded) ++it.summary.included;
    if (a.status == Status::kCandidate) ++it.summary.candidates;
  }
  it.summary.feature_list = it.model.group.features;
  if (it.index > 0) it.summary.changed_figures = CountChanged(iterations_[it.index - 1].assignment, it.assignment);
}

const SessionIteration &Session::Identify(std::vector<std::string> scope, const IdentifyConfig &config) {
  for (const auto &id : scope) corpus_->Figure(id);
  std::vector<std::string> positives = config.positives ? *config.positives : scope;
  for (const auto &id : positives) corpus_->Figure(id);
  SessionIteration it = RunPipeline(std::move(scope), std::move(positives), config);
  it.index = iterations_.size();
  it.origin = "identify";
  Finish(it);
  iterations_.push_back(std::move(it));
  return iterations_.back();
}

const SessionIteration &Session::Update() {
  const SessionIteration &cur = iteration(current());
  auto positives = cur.Included();
  if (positives.size() < 2) {
    throw Error(ErrorCode::kTooFewPositives, "update needs at least 2 included figures, got " +
                                                 std::to_string(positives.size()))
        .WithStage("update");
  }
  SessionIteration it = RunPipeline(cur.scope, std::move(positives), cur.config);
  for (const auto &prev : cur.assignment) {
    if (prev.origin != Origin::kManual) continue;
    auto pos = std::lower_bound(it.assignment.begin(), it.assignment.end(), prev.figure,
                                [](const FigureAssignment &a, const std::string &f) { return a.figure < f; });
    if (pos != it.assignment.end() && pos->figure == prev.figure) {
      pos->status = prev.status;
      pos->origin = Origin::kManual;
    }
  }
  it.index = iterations_.size();
  it.origin = "update";
  Finish(it);
  iterations_.push_back(std::move(it));
  return iterations_.back();
}

const SessionIteration &Session::Revert(std::size_t index) {
  SessionIteration it = iteration(index);
  it.index = iterations_.size();
  it.origin = "revert";
  it.reverted_from = index;
  it.manual_edits.clear();
  Finish(it);
  iterations_.push_back(std::move(it));
  return iterations_.back();
}

const SessionIteration &Session::ApplyEdits(std::span<const EditOp> edits) {
  // Edits are all-or-nothing: work on a copy and commit at the end.
  SessionIteration it = iteration(current());
  const DescriptionStore &store = corpus_->store;
  Concept &model = it.model;
  auto feature_slot = [&](const std::string &id) {
    const std::size_t i = model.group.IndexOf(id);
    if (i == std::string::npos) throw Invalid("feature '" + id + "' is not part of the concept");
    return i;
  };
  for (const EditOp &op : edits) {
    switch (op.type) {
      case EditOp::Type::kLabel: {
        auto pos = std::lower_bound(it.assignment.begin(), it.assignment.end(), op.figure,
                                    [](const FigureAssignment &a, const std::string &f) { return a.figure < f; });
        if (pos == it.assignment.end() || pos->figure != op.figure) {
          throw Error(ErrorCode::kUnknownFigure, "figure '" + op.figure + "' is not in the iteration scope");
        }
        it.manual_edits.push_back(ManualEdit{op.figure, pos->status, op.status, clock_()});
        pos->status = op.status;
        pos->origin = Origin::kManual;
        break;
      }
      case EditOp::Type::kReplace: {
        const std::size_t slot = feature_slot(op.feature);
        const auto &alts = model.group.redundant_neighbors[slot];
        if (std::find(alts.begin(), alts.end(), op.with) == alts.end()) {
          throw Error(ErrorCode::kNotARedundantNeighbor,
                      "'" + op.with + "' is not a redundant neighbor of '" + op.feature + "'");
        }
        std::vector<Feature> candidates;
        for (const auto &c : it.features) candidates.push_back(ParseFeature(c.id));
        const FeatureSet set(candidates, it.scope, store);
        std::vector<std::size_t> members;
        std::map<std::string, double> weights;
        for (std::size_t i = 0; i < model.group.features.size(); ++i) {
          const std::string &id = i == slot ? op.with : model.group.features[i];
          weights[id] = model.weights[i];
          for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (candidates[c].id() == id) members.push_back(c);
          }
        }
        model.group = MakeGroup(set, members, it.config.ga.alpha);
        model.features = ResolveGroup(model.group, candidates);
        model.weights.clear();
        for (const auto &id : model.group.features) model.weights.push_back(weights.at(id));
        model.meta.retrain_needed = true;
        Rescore(model, it.assignment, store, it.config.thresholds);
        break;
      }
      case EditOp::Type::kWeight:
        if (!std::isfinite(op.weight)) throw Invalid("weight must be finite");
        model.weights[feature_slot(op.feature)] = op.weight;
        Rescore(model, it.assignment, store, it.config.thresholds);
        break;
      case EditOp::Type::kRetrain: {
        Concept trained = Staged("train", [&] {
          return TrainConcept(model.group, model.features, it.positives, it.scope, store, it.config.train);
        });
        model = std::move(trained);
        Rescore(model, it.assignment, store, it.config.thresholds);
        break;
      }
    }
  }
  Finish(it);
  iterations_.back() = std::move(it);
  return iterations_.back();
}

std::vector<std::size_t> ConceptSupport(const SessionIteration &it, const DescriptionStore &store) {
  std::vector<std::size_t> out;
  for (const auto &f : it.model.features) out.push_back(SupportOf(f, it.scope, store).size());
  return out;
}

std::string Session::ExportCsv(std::size_t index) const {
  const SessionIteration &it = iteration(index);
  const auto support = ConceptSupport(it, corpus_->store);
  std::vector<std::size_t> order(it.model.k());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (it.model.weights[a] != it.model.weights[b]) return it.model.weights[a] > it.model.weights[b];
    return it.model.features[a].id() < it.model.features[b].id();
  });
  std::string out = "feature_id,kind,weight,support_count\n";
  for (std::size_t i : order) {
    const Feature &f = it.model.features[i];
    out += CsvField(f.id()) + "," + std::string(FeatureKindName(f.kind())) + "," +
           FormatDouble(it.model.weights[i]) + "," + std::to_string(support[i]) + "\n";
  }
  out += "\nfigure_id,name,score,status,origin\n";
  std::vector<const FigureAssignment *> included;
  for (const auto &a : it.assignment) {
    if (a.status == Status::kIncluded) included.push_back(&a);
  }
  std::sort(included.begin(), included.end(), [](const FigureAssignment *a, const FigureAssignment *b) {
    if (a->score != b->score) return a->score > b->score;
    return a->figure < b->figure;
  });
  for (const FigureAssignment *a : included) {
    out += CsvField(a->figure) + "," + CsvField(corpus_->Figure(a->figure).label) + "," + FormatDouble(a->score) +
           "," + std::string(StatusName(a->status)) + "," + std::string(OriginName(a->origin)) + "\n";
  }
  return out;
}

void Session::Restore(SessionIteration it) {
  if (it.index < iterations_.size()) {
    iterations_[it.index] = std::move(it);
  } else if (it.index == iterations_.size()) {
    iterations_.push_back(std::move(it));
  } else {
    throw Error(ErrorCode::kUnknownIteration, "log skips iteration " + std::to_string(iterations_.size()));
  }
}

}  // namespace cohort
