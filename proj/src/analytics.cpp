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
#include "cohort/analytics.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cohort/community.hpp"
#include "cohort/error.hpp"

namespace cohort {

namespace {

const Node &FigureNode(const KnowledgeGraph &graph, std::string_view id) {
  auto idx = graph.FindNode(id);
  if (!idx || graph.TypeOf(graph.node(*idx)).kind != NodeKind::kFigure) {
    throw Error(ErrorCode::kUnknownFigure, "unknown figure '" + std::string(id) + "'");
  }
  return graph.node(*idx);
}

bool HasRole(const KnowledgeGraph &graph, const Node &n, EntityRole role) {
  const NodeType &t = graph.TypeOf(n);
  return t.kind == NodeKind::kEntity && t.role == role;
}

std::optional<std::string> EventLocation(const KnowledgeGraph &graph, const Node &event) {
  const auto around = graph.Neighbors(event.id, std::nullopt, Direction::kBoth);
  for (const Neighbor &nb : around) {
    if (HasRole(graph, *nb.node, EntityRole::kLocation)) return nb.node->id;
  }
  for (const Neighbor &nb : around) {
    if (!HasRole(graph, *nb.node, EntityRole::kOffice)) continue;
    for (const Neighbor &loc : graph.Neighbors(nb.node->id, std::nullopt, Direction::kBoth)) {
      if (HasRole(graph, *loc.node, EntityRole::kLocation)) return loc.node->id;
    }
  }
  return std::nullopt;
}

std::vector<std::string> Participants(const std::vector<const EventRecord *> &records) {
  std::set<std::string> out;
  for (const EventRecord *r : records) {
    out.insert(r->figure);
    out.insert(r->co_figures.begin(), r->co_figures.end());
  }
  return {out.begin(), out.end()};
}

// First record per event id, in event id order.
std::vector<const EventRecord *> DistinctEvents(std::span<const EventRecord> events) {
  std::map<std::string_view, const EventRecord *> first;
  for (const auto &e : events) first.emplace(e.event, &e);
  std::vector<const EventRecord *> out;
  for (const auto &[id, e] : first) out.push_back(e);
  return out;
}

}  // namespace

std::string_view CategoryName(EventCategory c) {
  switch (c) {
    case EventCategory::kPolitics:
      return "politics";
    case EventCategory::kAcademic:
      return "academic";
    case EventCategory::kReligion:
      return "religion";
    case EventCategory::kSociality:
      return "sociality";
    case EventCategory::kMilitary:
      return "military";
  }
  return "sociality";
}

std::optional<EventCategory> CategoryFromName(std::string_view name) {
  for (EventCategory c : kEventCategories) {
    if (CategoryName(c) == name) return c;
  }
  return std::nullopt;
}

DerivedEvents DeriveEvents(const KnowledgeGraph &graph, const SchemaMapping &schema,
                           std::span<const std::string> figures) {
  std::vector<std::string> ids(figures.begin(), figures.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  DerivedEvents out;
  for (const auto &fig : ids) {
    FigureNode(graph, fig);
    std::map<std::string, const Neighbor *> events;
    const auto around = graph.Neighbors(fig, std::nullopt, Direction::kBoth);
    for (const Neighbor &nb : around) {
      if (graph.TypeOf(*nb.node).kind == NodeKind::kEvent) events.emplace(nb.node->id, &nb);
    }
    for (const auto &[event_id, nb] : events) {
      EventRecord r;
      r.event = event_id;
      r.figure = fig;
      r.label = nb->node->label;
      const std::string &edge_type = graph.types().edge_type(nb->edge->type).name;
      auto cat = schema.event_categories.find(edge_type);
      std::optional<EventCategory> category;
      if (cat != schema.event_categories.end()) category = CategoryFromName(cat->second);
      if (!category) ++out.unmapped;
      r.category = category.value_or(EventCategory::kSociality);
      r.year = KnowledgeGraph::YearOf(nb->node->attrs);
      if (!r.year) r.year = KnowledgeGraph::YearOf(nb->edge->attrs);
      r.location = EventLocation(graph, *nb->node);
      std::set<std::string> co;
      for (const Neighbor &p : graph.Neighbors(event_id, std::nullopt, Direction::kBoth)) {
        if (graph.TypeOf(*p.node).kind == NodeKind::kFigure && p.node->id != fig) co.insert(p.node->id);
      }
      r.co_figures.assign(co.begin(), co.end());
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

EventRanking RankCounts(const std::array<std::size_t, 5> &counts) {
  EventRanking r;
  std::vector<std::pair<EventCategory, std::size_t>> nonzero;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    r.total += counts[i];
    if (counts[i] > 0) nonzero.emplace_back(kEventCategories[i], counts[i]);
  }
  std::sort(nonzero.begin(), nonzero.end(), [](const auto &a, const auto &b) {
    if (a.second != b.second) return a.second > b.second;
    return CategoryName(a.first) < CategoryName(b.first);
  });
  if (nonzero.size() > 3) nonzero.resize(3);
  r.top3 = std::move(nonzero);
  return r;
}

EventRanking RankEvents(std::string_view figure, std::span<const EventRecord> events) {
  std::array<std::size_t, 5> counts{};
  for (const auto &e : events) {
    if (e.figure == figure) ++counts[static_cast<std::size_t>(e.category)];
  }
  return RankCounts(counts);
}

RelationshipMatrix BuildRelationshipMatrix(std::span<const std::string> figures, std::span<const EventRecord> events) {
  const std::size_t n = figures.size();
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(figures[i], i);

  std::map<std::string_view, std::vector<const EventRecord *>> by_event;
  for (const auto &e : events) by_event[e.event].push_back(&e);
  std::vector<std::vector<std::size_t>> cells(n, std::vector<std::size_t>(n, 0));
  for (const auto &[id, records] : by_event) {
    std::vector<std::size_t> members;
    for (const auto &p : Participants(records)) {
      auto it = index.find(p);
      if (it != index.end()) members.push_back(it->second);
    }
    for (std::size_t a : members) {
      for (std::size_t b : members) {
        if (a != b) ++cells[a][b];
      }
    }
  }

  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (cells[i][j] > 0) edges.push_back({i, j, static_cast<double>(cells[i][j])});
    }
  }
  const Partition part = GirvanNewman(UndirectedGraph::Simple(n, edges));

  std::vector<std::size_t> mass(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) mass[i] += cells[i][j];
  }
  // Community labels are the index of their first member, so sorting by
  // label orders communities by earliest input figure.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (part.community[a] != part.community[b]) return part.community[a] < part.community[b];
    if (mass[a] != mass[b]) return mass[a] > mass[b];
    return a < b;
  });

  RelationshipMatrix m;
  m.communities = part.count;
  std::map<std::size_t, std::size_t> renumber;
  for (std::size_t i : order) {
    m.figures.push_back(figures[i]);
    auto [it, fresh] = renumber.emplace(part.community[i], renumber.size());
    m.community.push_back(it->second);
  }
  m.cells.assign(n, std::vector<std::size_t>(n, 0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) m.cells[a][b] = cells[order[a]][order[b]];
  }
  return m;
}

std::vector<MapBin> EventMap(const KnowledgeGraph &graph, std::span<const EventRecord> events) {
  std::map<std::string, std::size_t> counts;
  for (const EventRecord *e : DistinctEvents(events)) {
    if (e->location) ++counts[*e->location];
  }
  std::vector<MapBin> out;
  for (const auto &[loc, count] : counts) {
    MapBin bin;
    bin.location = loc;
    bin.count = count;
    if (auto idx = graph.FindNode(loc)) {
      for (const auto &[key, value] : graph.node(*idx).attrs) {
        if (const auto *g = std::get_if<GeoPoint>(&value)) {
          bin.lat = g->lat;
          bin.lon = g->lon;
          break;
        }
      }
    }
    out.push_back(std::move(bin));
  }
  std::stable_sort(out.begin(), out.end(), [](const MapBin &a, const MapBin &b) { return a.count > b.count; });
  return out;
}

std::vector<TimelineBin> EventTimeline(std::span<const EventRecord> events) {
  std::map<std::int64_t, TimelineBin> bins;
  for (const EventRecord *e : DistinctEvents(events)) {
    if (!e->year) continue;
    TimelineBin &bin = bins[*e->year];
    bin.year = *e->year;
    ++bin.count;
    if (bin.samples.size() < kTimelineSamples) bin.samples.push_back(e->label);
  }
  std::vector<TimelineBin> out;
  for (auto &[year, bin] : bins) out.push_back(std::move(bin));
  return out;
}

std::vector<EventRecord> FigureHistory(std::string_view figure, std::span<const EventRecord> events,
                                       std::optional<EventCategory> category) {
  std::vector<EventRecord> out;
  for (const auto &e : events) {
    if (e.figure == figure && (!category || e.category == *category)) out.push_back(e);
  }
  std::stable_sort(out.begin(), out.end(), [](const EventRecord &a, const EventRecord &b) {
    if (a.year.has_value() != b.year.has_value()) return a.year.has_value();
    if (a.year != b.year) return *a.year < *b.year;
    return a.event < b.event;
  });
  return out;
}

OrderedJson EventToJson(const EventRecord &e) {
  OrderedJson j{{"event", e.event}, {"figure", e.figure}, {"category", CategoryName(e.category)}};
  j["year"] = e.year ? OrderedJson(*e.year) : OrderedJson();
  j["location"] = e.location ? OrderedJson(*e.location) : OrderedJson();
  j["co_figures"] = e.co_figures;
  j["label"] = e.label;
  return j;
}

OrderedJson RankingToJson(const EventRanking &r) {
  OrderedJson top = OrderedJson::array();
  for (const auto &[cat, count] : r.top3) top.push_back(OrderedJson{{"category", CategoryName(cat)}, {"count", count}});
  return OrderedJson{{"total", r.total}, {"top3", std::move(top)}};
}

OrderedJson MatrixToJson(const RelationshipMatrix &m) {
  return OrderedJson{
      {"figures", m.figures}, {"community", m.community}, {"communities", m.communities}, {"cells", m.cells}};
}

OrderedJson MapToJson(std::span<const MapBin> bins) {
  OrderedJson out = OrderedJson::array();
  for (const auto &b : bins) {
    OrderedJson j{{"location", b.location}};
    j["lat"] = b.lat ? OrderedJson(*b.lat) : OrderedJson();
    j["lon"] = b.lon ? OrderedJson(*b.lon) : OrderedJson();
    j["count"] = b.count;
    out.push_back(std::move(j));
  }
  return out;
}

OrderedJson TimelineToJson(std::span<const TimelineBin> bins) {
  OrderedJson out = OrderedJson::array();
  for (const auto &b : bins) out.push_back(OrderedJson{{"year", b.year}, {"count", b.count}, {"samples", b.samples}});
  return out;
}

OrderedJson FigureDetails(const KnowledgeGraph &graph, const SchemaMapping &schema, const DescriptionStore &store,
                          std::string_view figure, std::span<const Feature> features) {
  const Node &node = FigureNode(graph, figure);
  OrderedJson j;
  j["id"] = node.id;
  j["label"] = node.label;
  j["type"] = graph.TypeOf(node).name;
  j["attrs"] = AttrsToJson(node.attrs);
  j["descriptions"] = store.CountFor(figure);

  std::vector<std::pair<std::string, double>> matched;
  for (const auto &f : features) {
    auto freq = Frequency(f, figure, store);
    if (freq && *freq > 0.0) matched.emplace_back(f.id(), *freq);
  }
  std::sort(matched.begin(), matched.end(), [](const auto &a, const auto &b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  j["features"] = OrderedJson::array();
  for (const auto &[id, freq] : matched) j["features"].push_back(OrderedJson{{"id", id}, {"frequency", freq}});

  const std::string id(figure);
  const auto events = DeriveEvents(graph, schema, std::span<const std::string>(&id, 1)).records;
  std::array<std::size_t, 5> counts{};
  for (const auto &e : events) ++counts[static_cast<std::size_t>(e.category)];
  OrderedJson by_category;
  for (EventCategory c : kEventCategories) by_category[std::string(CategoryName(c))] = counts[static_cast<std::size_t>(c)];
  OrderedJson summary = RankingToJson(RankCounts(counts));
  summary["by_category"] = std::move(by_category);
  j["events"] = std::move(summary);

  j["relationships"] = OrderedJson::array();
  for (const Neighbor &nb : graph.Neighbors(figure, std::nullopt, Direction::kBoth)) {
    if (graph.TypeOf(*nb.node).kind != NodeKind::kFigure) continue;
    const EdgeType &et = graph.types().edge_type(nb.edge->type);
    const std::string direction = et.symmetric ? "both" : (graph.node(nb.edge->source).id == id ? "out" : "in");
    j["relationships"].push_back(OrderedJson{{"edge", nb.edge->id},
                                             {"edge_type", et.name},
                                             {"direction", direction},
                                             {"figure", nb.node->id},
                                             {"label", nb.node->label}});
  }

  std::vector<std::string> sources;
  for (const auto &[key, value] : node.attrs) {
    if (key.rfind("source_url", 0) != 0) continue;
    if (const auto *s = std::get_if<std::string>(&value)) sources.push_back(*s);
  }
  if (!sources.empty()) j["sources"] = sources;
  return j;
}

}  // namespace cohort
