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
#include "cohort/walker.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <istream>
#include <ostream>
#include <thread>

#include "cohort/error.hpp"
#include "cohort/random.hpp"

namespace cohort {

namespace {

TypeIndex RequireNodeType(const TypeRegistry &types, const std::string &name) {
  auto t = types.FindNodeType(name);
  if (!t) throw Error(ErrorCode::kUnknownType, "unknown node type \"" + name + "\"");
  return *t;
}

TypeIndex RequireEdgeType(const TypeRegistry &types, const std::string &name) {
  auto t = types.FindEdgeType(name);
  if (!t) throw Error(ErrorCode::kUnknownType, "unknown edge type \"" + name + "\"");
  return *t;
}

bool StepAccepts(const TypeRegistry &types, TypeIndex from, const TemplateStep &step) {
  const TypeIndex src = types.edge_source(step.edge_type);
  const TypeIndex dst = types.edge_target(step.edge_type);
  if (step.dir == Direction::kOut) return src == from && dst == step.node_type;
  return dst == from && src == step.node_type;
}

// Validates "{i}" / "{i.attr}" slots against the path length.
void CheckRender(const MetaPathTemplate &t) {
  const std::string &r = t.render;
  for (std::size_t pos = r.find('{'); pos != std::string::npos; pos = r.find('{', pos + 1)) {
    const std::size_t close = r.find('}', pos);
    if (close == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "template \"" + t.id + "\": unterminated render slot");
    }
    const std::string slot = r.substr(pos + 1, close - pos - 1);
    const std::string index = slot.substr(0, slot.find('.'));
    if (index.empty() || !std::all_of(index.begin(), index.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
        std::stoul(index) > t.steps.size()) {
      throw Error(ErrorCode::kInvalidArgument, "template \"" + t.id + "\": bad render slot {" + slot + "}");
    }
  }
}

OrderedJson TokensToJson(const DescriptionTokens &t) {
  OrderedJson j;
  j["years"] = t.years;
  j["locations"] = t.locations;
  j["offices"] = t.offices;
  j["co_figures"] = t.co_figures;
  j["entities"] = t.entities;
  j["relationships"] = OrderedJson::array();
  for (const auto &r : t.relationships) {
    j["relationships"].push_back(OrderedJson{{"type", r.type}, {"source", r.source}, {"target", r.target}});
  }
  return j;
}

// One walk attempt; false on a dead end.
bool WalkOnce(const KnowledgeGraph &graph, const MetaPathTemplate &t, std::size_t anchor, Rng &rng,
              std::vector<std::size_t> &nodes, std::vector<std::size_t> &edges) {
  nodes.assign(1, anchor);
  edges.clear();
  std::vector<std::size_t> candidates;
  for (const auto &step : t.steps) {
    const std::size_t here = nodes.back();
    candidates.clear();
    for (std::size_t e : graph.Adjacent(here, step.edge_type, step.dir)) {
      if (graph.node(graph.Opposite(graph.edge(e), here)).type == step.node_type) candidates.push_back(e);
    }
    if (candidates.empty()) return false;
    const std::size_t e = candidates[rng.UniformIndex(candidates.size())];
    edges.push_back(e);
    nodes.push_back(graph.Opposite(graph.edge(e), here));
  }
  return true;
}

}  // namespace

std::vector<MetaPathTemplate> CompileTemplates(const Json &defs, const TypeRegistry &types) {
  std::vector<MetaPathTemplate> out;
  if (!defs.is_array()) throw Error(ErrorCode::kInvalidArgument, "template definitions must be a JSON array");
  for (const auto &d : defs) {
    MetaPathTemplate t;
    try {
      t.id = d.at("id").get<std::string>();
      t.anchor = RequireNodeType(types, d.at("anchor").get<std::string>());
      t.render = d.value("render", "");
      for (const auto &s : d.at("steps")) {
        TemplateStep step;
        step.edge_type = RequireEdgeType(types, s.at("edge").get<std::string>());
        const std::string dir = s.value("dir", "out");
        if (dir != "out" && dir != "in") {
          throw Error(ErrorCode::kInvalidArgument, "template \"" + t.id + "\": dir must be out|in");
        }
        step.dir = dir == "out" ? Direction::kOut : Direction::kIn;
        step.node_type = RequireNodeType(types, s.at("node").get<std::string>());
        t.steps.push_back(step);
      }
    } catch (const Json::exception &e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("malformed template definition: ") + e.what());
    }
    if (types.node_type(t.anchor).kind != NodeKind::kFigure) {
      throw Error(ErrorCode::kIncompatibleStep, "template \"" + t.id + "\": anchor must be a figure type")
          .WithPosition(0);
    }
    TypeIndex from = t.anchor;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      if (!StepAccepts(types, from, t.steps[i])) {
        throw Error(ErrorCode::kIncompatibleStep,
                    "template \"" + t.id + "\": step " + std::to_string(i + 1) + " edge \"" +
                        types.edge_type(t.steps[i].edge_type).name + "\" does not accept \"" +
                        types.node_type(from).name + "\"")
            .WithPosition(i + 1);
      }
      from = t.steps[i].node_type;
    }
    CheckRender(t);
    out.push_back(std::move(t));
  }
  return out;
}

void DescriptionStore::Add(Description d) {
  ++size_;
  by_figure_[d.figure].push_back(std::move(d));
}

std::span<const Description> DescriptionStore::For(std::string_view figure) const {
  auto it = by_figure_.find(figure);
  if (it == by_figure_.end()) return {};
  return it->second;
}

OrderedJson DescriptionToJson(const Description &d) {
  OrderedJson j;
  j["id"] = d.id;
  j["figure"] = d.figure;
  j["template"] = d.template_id;
  j["nodes"] = d.nodes;
  j["edges"] = d.edges;
  j["tokens"] = TokensToJson(d.tokens);
  return j;
}

Description DescriptionFromJson(const Json &j) {
  Description d;
  d.id = j.at("id").get<std::string>();
  d.figure = j.at("figure").get<std::string>();
  d.template_id = j.at("template").get<std::string>();
  d.nodes = j.at("nodes").get<std::vector<std::string>>();
  d.edges = j.at("edges").get<std::vector<std::string>>();
  const Json &t = j.at("tokens");
  d.tokens.years = t.at("years").get<std::vector<std::int64_t>>();
  d.tokens.locations = t.at("locations").get<std::vector<std::string>>();
  d.tokens.offices = t.at("offices").get<std::vector<std::string>>();
  d.tokens.co_figures = t.at("co_figures").get<std::vector<std::string>>();
  d.tokens.entities = t.at("entities").get<std::vector<std::string>>();
  for (const auto &r : t.at("relationships")) {
    d.tokens.relationships.push_back(RelationToken{r.at("type").get<std::string>(),
                                                   r.at("source").get<std::string>(),
                                                   r.at("target").get<std::string>()});
  }
  return d;
}

void DescriptionStore::WriteJsonl(std::ostream &out) const {
  for (const auto &[figure, descs] : by_figure_) {
    for (const auto &d : descs) out << DescriptionToJson(d).dump() << '\n';
  }
}

DescriptionStore DescriptionStore::ReadJsonl(std::istream &in) {
  DescriptionStore store;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      store.Add(DescriptionFromJson(Json::parse(line)));
    } catch (const Json::exception &e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("malformed description line: ") + e.what());
    }
  }
  return store;
}

DescriptionTokens ExtractTokens(const KnowledgeGraph &graph, std::span<const std::size_t> nodes,
                                std::span<const std::size_t> edges) {
  DescriptionTokens tokens;
  const auto &types = graph.types();
  const std::size_t anchor = nodes.empty() ? 0 : nodes.front();
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const Node &n = graph.node(nodes[i]);
    const NodeType &nt = types.node_type(n.type);
    switch (nt.kind) {
      case NodeKind::kFigure:
        if (nodes[i] != anchor) tokens.co_figures.push_back(n.id);
        break;
      case NodeKind::kEvent:
        if (auto y = KnowledgeGraph::YearOf(n.attrs)) tokens.years.push_back(*y);
        break;
      case NodeKind::kEntity:
        switch (nt.role) {
          case EntityRole::kLocation:
            tokens.locations.push_back(n.id);
            break;
          case EntityRole::kOffice:
            tokens.offices.push_back(n.id);
            break;
          default:
            tokens.entities.push_back(n.id);
            break;
        }
        break;
    }
  }
  for (std::size_t e : edges) {
    const Edge &edge = graph.edge(e);
    if (auto y = KnowledgeGraph::YearOf(edge.attrs)) tokens.years.push_back(*y);
    if (types.IsRelationship(edge.type)) {
      tokens.relationships.push_back(RelationToken{types.edge_type(edge.type).name, graph.node(edge.source).id,
                                                   graph.node(edge.target).id});
    }
  }
  return tokens;
}

DescriptionStore GenerateDescriptions(const KnowledgeGraph &graph,
                                      std::span<const MetaPathTemplate> templates,
                                      const WalkConfig &config, std::uint64_t seed) {
  const auto figures = graph.NodesOfKind(NodeKind::kFigure);
  const std::size_t jobs = figures.size() * templates.size();
  std::vector<std::vector<Description>> results(jobs);

  auto run = [&](std::size_t job) {
    const std::size_t anchor = figures[job / templates.size()];
    const MetaPathTemplate &t = templates[job % templates.size()];
    const Node &fig = graph.node(anchor);
    if (fig.type != t.anchor) return;
    Rng rng(StreamSeed(seed, std::string_view(fig.id), std::string_view(t.id)));
    std::vector<std::size_t> nodes;
    std::vector<std::size_t> edges;
    for (int w = 0; w < config.walks_per_figure_per_template; ++w) {
      bool ok = false;
      for (int attempt = 0; attempt <= config.max_retries && !ok; ++attempt) {
        ok = WalkOnce(graph, t, anchor, rng, nodes, edges);
      }
      if (!ok) continue;
      Description d;
      char suffix[16];
      std::snprintf(suffix, sizeof(suffix), "%04d", w);
      d.id = fig.id + "/" + t.id + "/" + suffix;
      d.figure = fig.id;
      d.template_id = t.id;
      for (std::size_t n : nodes) d.nodes.push_back(graph.node(n).id);
      for (std::size_t e : edges) d.edges.push_back(graph.edge(e).id);
      d.tokens = ExtractTokens(graph, nodes, edges);
      results[job].push_back(std::move(d));
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(jobs)));
  if (threads <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) run(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs; j = next++) run(j);
      });
    }
  }

  // Jobs are laid out (figure, template) in id order, so merging is stable.
  DescriptionStore store;
  for (auto &batch : results) {
    for (auto &d : batch) store.Add(std::move(d));
  }
  return store;
}

std::string RenderDescription(const KnowledgeGraph &graph, const MetaPathTemplate &tmpl, const Description &d) {
  std::string out;
  const std::string &r = tmpl.render;
  std::size_t pos = 0;
  while (pos < r.size()) {
    const std::size_t open = r.find('{', pos);
    if (open == std::string::npos) {
      out.append(r, pos);
      break;
    }
    out.append(r, pos, open - pos);
    const std::size_t close = r.find('}', open);
    const std::string slot = r.substr(open + 1, close - open - 1);
    const std::size_t dot = slot.find('.');
    const std::size_t index = std::stoul(slot.substr(0, dot));
    if (index < d.nodes.size()) {
      const Node &n = graph.node(graph.NodeIndex(d.nodes[index]));
      if (dot == std::string::npos) {
        out += n.label.empty() ? n.id : n.label;
      } else if (auto it = n.attrs.find(slot.substr(dot + 1)); it != n.attrs.end()) {
        const Json v = AttrToJson(it->second);
        out += v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    pos = close + 1;
  }
  return out;
}

}  // namespace cohort
