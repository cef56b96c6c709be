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
#include "cohort/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <utility>

#include "cohort/error.hpp"

namespace cohort {

namespace {

Error SchemaError(const std::string &msg) { return Error(ErrorCode::kSchemaViolation, msg); }

std::string_view DirectionName(Direction d) {
  switch (d) {
    case Direction::kOut:
      return "out";
    case Direction::kIn:
      return "in";
    case Direction::kBoth:
      return "both";
  }
  return "out";
}

Direction ParseDirection(const std::string &s) {
  if (s == "out") return Direction::kOut;
  if (s == "in") return Direction::kIn;
  throw SchemaError("foreign key direction must be \"out\" or \"in\", got \"" + s + "\"");
}

std::string_view AttrKindName(AttrKind k) {
  switch (k) {
    case AttrKind::kString:
      return "string";
    case AttrKind::kInteger:
      return "integer";
    case AttrKind::kYear:
      return "year";
    case AttrKind::kGeo:
      return "geo";
  }
  return "string";
}

AttrKind ParseAttrKind(const std::string &s) {
  if (s == "string") return AttrKind::kString;
  if (s == "integer") return AttrKind::kInteger;
  if (s == "year") return AttrKind::kYear;
  if (s == "geo") return AttrKind::kGeo;
  throw SchemaError("unknown attribute kind \"" + s + "\"");
}

NodeKind ParseNodeKind(const std::string &s) {
  if (s == "figure") return NodeKind::kFigure;
  if (s == "entity") return NodeKind::kEntity;
  if (s == "event") return NodeKind::kEvent;
  throw SchemaError("unknown node kind \"" + s + "\"");
}

EntityRole ParseRole(const std::string &s) {
  if (s == "location") return EntityRole::kLocation;
  if (s == "office") return EntityRole::kOffice;
  if (s == "entity") return EntityRole::kEntity;
  if (s == "none") return EntityRole::kNone;
  throw SchemaError("unknown entity role \"" + s + "\"");
}

AttrKind KindOf(const AttrValue &v) {
  switch (v.index()) {
    case 0:
      return AttrKind::kString;
    case 1:
      return AttrKind::kInteger;
    case 2:
      return AttrKind::kYear;
    default:
      return AttrKind::kGeo;
  }
}

// Opaque ids may arrive as strings or integers; never parsed further.
std::optional<std::string> IdFromJson(const Json &v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  return std::nullopt;
}

AttrValue AttrFromJson(const Json &v, AttrKind kind, const std::string &column) {
  auto fail = [&](const char *what) {
    return SchemaError("column \"" + column + "\": expected " + what + ", got " + v.dump());
  };
  switch (kind) {
    case AttrKind::kString:
      if (!v.is_string()) throw fail("string");
      return v.get<std::string>();
    case AttrKind::kInteger:
      if (!v.is_number_integer()) throw fail("integer");
      return v.get<std::int64_t>();
    case AttrKind::kYear:
      if (!v.is_number_integer()) throw fail("integer year");
      return Year{v.get<std::int64_t>()};
    case AttrKind::kGeo: {
      double lat = 0.0;
      double lon = 0.0;
      if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        lat = v[0].get<double>();
        lon = v[1].get<double>();
      } else if (v.is_object() && v.contains("lat") && v.contains("lon") && v["lat"].is_number() &&
                 v["lon"].is_number()) {
        lat = v["lat"].get<double>();
        lon = v["lon"].get<double>();
      } else {
        throw fail("[lat, lon]");
      }
      if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) {
        throw fail("coordinates within [-90,90] x [-180,180]");
      }
      return GeoPoint{lat, lon};
    }
  }
  throw fail("value");
}

AttrMap ReadAttrs(const Json &row, const std::vector<ColumnSpec> &columns) {
  AttrMap attrs;
  for (const auto &col : columns) {
    auto it = row.find(col.column);
    if (it == row.end() || it->is_null()) continue;
    attrs[col.attr.empty() ? col.column : col.attr] = AttrFromJson(*it, col.kind, col.column);
  }
  return attrs;
}

Json EndpointToJson(const EndpointSpec &e) { return Json{{"column", e.column}, {"table", e.table}}; }

EndpointSpec EndpointFromJson(const Json &j) {
  return EndpointSpec{j.at("column").get<std::string>(), j.at("table").get<std::string>()};
}

}  // namespace

// ---- TypeRegistry ----------------------------------------------------------

TypeIndex TypeRegistry::AddNodeType(NodeType type) {
  if (type.name.empty()) throw SchemaError("node type name must be nonempty");
  if (node_index_.count(type.name)) throw SchemaError("duplicate node type \"" + type.name + "\"");
  if (type.kind != NodeKind::kEntity) type.role = EntityRole::kNone;
  if (type.kind == NodeKind::kEntity && type.role == EntityRole::kNone) type.role = EntityRole::kEntity;
  auto idx = static_cast<TypeIndex>(node_types_.size());
  node_index_.emplace(type.name, idx);
  node_types_.push_back(std::move(type));
  return idx;
}

TypeIndex TypeRegistry::AddEdgeType(EdgeType type) {
  if (type.name.empty()) throw SchemaError("edge type name must be nonempty");
  if (edge_index_.count(type.name)) throw SchemaError("duplicate edge type \"" + type.name + "\"");
  auto src = FindNodeType(type.source_type);
  auto dst = FindNodeType(type.target_type);
  if (!src || !dst) {
    throw Error(ErrorCode::kUnknownType, "edge type \"" + type.name + "\" references unregistered node type");
  }
  if (type.symmetric && *src != *dst) {
    throw SchemaError("symmetric edge type \"" + type.name + "\" must join one node type");
  }
  auto idx = static_cast<TypeIndex>(edge_types_.size());
  edge_index_.emplace(type.name, idx);
  edge_endpoints_.emplace_back(*src, *dst);
  edge_types_.push_back(std::move(type));
  return idx;
}

std::optional<TypeIndex> TypeRegistry::FindNodeType(std::string_view name) const {
  auto it = node_index_.find(std::string(name));
  if (it == node_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<TypeIndex> TypeRegistry::FindEdgeType(std::string_view name) const {
  auto it = edge_index_.find(std::string(name));
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

bool TypeRegistry::IsRelationship(TypeIndex edge) const {
  const auto &[src, dst] = edge_endpoints_.at(edge);
  return node_types_[src].kind == NodeKind::kFigure && node_types_[dst].kind == NodeKind::kFigure;
}

// ---- KnowledgeGraph --------------------------------------------------------

std::optional<std::size_t> KnowledgeGraph::FindNode(std::string_view id) const {
  auto it = node_index_.find(std::string(id));
  if (it == node_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t KnowledgeGraph::NodeIndex(std::string_view id) const {
  auto idx = FindNode(id);
  if (!idx) throw Error(ErrorCode::kUnknownNode, "unknown node \"" + std::string(id) + "\"");
  return *idx;
}

std::span<const std::size_t> KnowledgeGraph::Adjacent(std::size_t node, TypeIndex edge_type,
                                                      Direction dir) const {
  for (const auto &bucket : adjacency_.at(node)) {
    if (bucket.edge_type == edge_type && bucket.dir == dir) return bucket.edges;
  }
  return {};
}

std::vector<Neighbor> KnowledgeGraph::Neighbors(std::string_view id,
                                                std::optional<std::string_view> edge_type,
                                                Direction dir) const {
  const std::size_t n = NodeIndex(id);
  std::optional<TypeIndex> filter;
  if (edge_type) {
    filter = types_.FindEdgeType(*edge_type);
    if (!filter) {
      throw Error(ErrorCode::kUnknownType, "unknown edge type \"" + std::string(*edge_type) + "\"");
    }
  }
  std::vector<std::size_t> hits;
  for (const auto &bucket : adjacency_[n]) {
    if (filter && bucket.edge_type != *filter) continue;
    if (dir != Direction::kBoth && bucket.dir != dir) continue;
    hits.insert(hits.end(), bucket.edges.begin(), bucket.edges.end());
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  std::vector<Neighbor> out;
  out.reserve(hits.size());
  for (std::size_t e : hits) out.push_back({&edges_[e], &nodes_[Opposite(edges_[e], n)]});
  return out;
}

std::size_t KnowledgeGraph::Degree(std::size_t node) const {
  std::set<std::size_t> incident;
  for (const auto &bucket : adjacency_.at(node)) incident.insert(bucket.edges.begin(), bucket.edges.end());
  return incident.size();
}

std::vector<std::size_t> KnowledgeGraph::NodesOfKind(NodeKind kind) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (types_.node_type(nodes_[i].type).kind == kind) out.push_back(i);
  }
  return out;
}

std::optional<std::int64_t> KnowledgeGraph::YearOf(const AttrMap &attrs) {
  if (auto it = attrs.find("year"); it != attrs.end()) {
    if (const auto *y = std::get_if<Year>(&it->second)) return y->value;
  }
  for (const auto &[key, value] : attrs) {
    if (const auto *y = std::get_if<Year>(&value)) return y->value;
  }
  return std::nullopt;
}

// ---- GraphBuilder ----------------------------------------------------------

bool GraphBuilder::AddNode(std::string id, TypeIndex type, std::string label, AttrMap attrs) {
  auto it = nodes_.find(id);
  if (it != nodes_.end()) {
    if (it->second.type != type) {
      throw SchemaError("node id \"" + id + "\" bound to both \"" + types_.node_type(it->second.type).name +
                        "\" and \"" + types_.node_type(type).name + "\"");
    }
    it->second = PendingNode{type, std::move(label), std::move(attrs)};
    return true;
  }
  nodes_.emplace(std::move(id), PendingNode{type, std::move(label), std::move(attrs)});
  return false;
}

std::optional<TypeIndex> GraphBuilder::NodeTypeOf(std::string_view id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) return std::nullopt;
  return it->second.type;
}

bool GraphBuilder::AddEdge(std::string id, TypeIndex type, std::string_view source,
                           std::string_view target, AttrMap attrs) {
  auto src = NodeTypeOf(source);
  auto dst = NodeTypeOf(target);
  if (!src || !dst) {
    throw Error(ErrorCode::kDanglingForeignKey,
                "edge \"" + id + "\" references undefined node \"" + std::string(src ? target : source) + "\"");
  }
  const auto &et = types_.edge_type(type);
  const TypeIndex want_src = types_.edge_source(type);
  const TypeIndex want_dst = types_.edge_target(type);
  if (*src != want_src || *dst != want_dst) {
    throw SchemaError("edge \"" + id + "\" of type \"" + et.name + "\" joins \"" + types_.node_type(*src).name +
                      "\" to \"" + types_.node_type(*dst).name + "\"");
  }
  PendingEdge pending{type, std::string(source), std::string(target), std::move(attrs)};
  auto [it, inserted] = edges_.try_emplace(std::move(id), pending);
  if (!inserted) it->second = std::move(pending);
  return !inserted;
}

KnowledgeGraph GraphBuilder::Build() && {
  KnowledgeGraph g;
  g.types_ = std::move(types_);
  g.nodes_.reserve(nodes_.size());
  for (auto &[id, pending] : nodes_) {
    g.node_index_.emplace(id, g.nodes_.size());
    g.nodes_.push_back(Node{id, pending.type, std::move(pending.label), std::move(pending.attrs)});
  }
  g.adjacency_.resize(g.nodes_.size());
  auto push = [&g](std::size_t node, TypeIndex type, Direction dir, std::size_t edge) {
    auto &buckets = g.adjacency_[node];
    auto it = std::find_if(buckets.begin(), buckets.end(),
                           [&](const auto &b) { return b.edge_type == type && b.dir == dir; });
    if (it == buckets.end()) {
      buckets.push_back({type, dir, {}});
      it = std::prev(buckets.end());
    }
    it->edges.push_back(edge);
  };
  g.edges_.reserve(edges_.size());
  for (auto &[id, pending] : edges_) {
    const std::size_t e = g.edges_.size();
    const std::size_t s = g.node_index_.at(pending.source);
    const std::size_t t = g.node_index_.at(pending.target);
    g.edges_.push_back(Edge{id, pending.type, s, t, std::move(pending.attrs)});
    push(s, pending.type, Direction::kOut, e);
    push(t, pending.type, Direction::kIn, e);
    if (g.types_.edge_type(pending.type).symmetric && s != t) {
      push(t, pending.type, Direction::kOut, e);
      push(s, pending.type, Direction::kIn, e);
    }
  }
  for (auto &buckets : g.adjacency_) {
    std::sort(buckets.begin(), buckets.end(), [](const auto &a, const auto &b) {
      return std::pair(a.edge_type, a.dir) < std::pair(b.edge_type, b.dir);
    });
  }
  return g;
}

// ---- SchemaMapping ---------------------------------------------------------

const TableBinding *SchemaMapping::FindTable(std::string_view name) const {
  for (const auto &t : tables) {
    if (t.table == name) return &t;
  }
  return nullptr;
}

void SchemaMapping::Validate() const {
  std::set<std::string> seen;
  auto node_type_of_table = [&](const std::string &table) -> TypeIndex {
    const TableBinding *ref = FindTable(table);
    if (ref == nullptr || !ref->node_type) {
      throw SchemaError("foreign key names table \"" + table + "\" which is not bound to a node type");
    }
    return *types.FindNodeType(*ref->node_type);
  };
  auto require_edge = [&](const std::string &name) {
    auto et = types.FindEdgeType(name);
    if (!et) throw Error(ErrorCode::kUnknownType, "unknown edge type \"" + name + "\"");
    return *et;
  };
  for (const auto &t : tables) {
    if (!seen.insert(t.table).second) throw SchemaError("duplicate table binding \"" + t.table + "\"");
    if (t.node_type.has_value() == t.edge_type.has_value()) {
      throw SchemaError("table \"" + t.table + "\" must bind exactly one of node_type / edge_type");
    }
    if (t.node_type && !types.FindNodeType(*t.node_type)) {
      throw Error(ErrorCode::kUnknownType, "unknown node type \"" + *t.node_type + "\"");
    }
  }
  for (const auto &t : tables) {
    if (t.node_type) {
      if (t.id_column.empty()) throw SchemaError("node table \"" + t.table + "\" needs an id column");
      const TypeIndex self = *types.FindNodeType(*t.node_type);
      for (const auto &fk : t.foreign_keys) {
        const TypeIndex et = require_edge(fk.edge_type);
        const TypeIndex other = node_type_of_table(fk.table);
        const TypeIndex src = fk.direction == Direction::kOut ? self : other;
        const TypeIndex dst = fk.direction == Direction::kOut ? other : self;
        if (types.edge_source(et) != src || types.edge_target(et) != dst) {
          throw SchemaError("foreign key \"" + t.table + "." + fk.column + "\" does not match edge type \"" +
                            fk.edge_type + "\" endpoints");
        }
      }
    } else {
      const TypeIndex et = require_edge(*t.edge_type);
      if (t.source.column.empty() || t.target.column.empty()) {
        throw SchemaError("edge table \"" + t.table + "\" needs source and target columns");
      }
      if (types.edge_source(et) != node_type_of_table(t.source.table) ||
          types.edge_target(et) != node_type_of_table(t.target.table)) {
        throw SchemaError("edge table \"" + t.table + "\" endpoints do not match edge type \"" + *t.edge_type +
                          "\"");
      }
    }
  }
  for (const auto &[edge, category] : event_categories) require_edge(edge);
}

SchemaMapping SchemaMapping::FromJson(const Json &doc) {
  SchemaMapping s;
  try {
    for (const auto &nt : doc.value("node_types", Json::array())) {
      NodeType t;
      t.name = nt.at("name").get<std::string>();
      t.kind = ParseNodeKind(nt.at("kind").get<std::string>());
      if (nt.contains("role")) t.role = ParseRole(nt["role"].get<std::string>());
      s.types.AddNodeType(std::move(t));
    }
    for (const auto &et : doc.value("edge_types", Json::array())) {
      EdgeType t;
      t.name = et.at("name").get<std::string>();
      t.source_type = et.at("source").get<std::string>();
      t.target_type = et.at("target").get<std::string>();
      t.symmetric = et.value("symmetric", false);
      s.types.AddEdgeType(std::move(t));
    }
    for (const auto &tj : doc.value("tables", Json::array())) {
      TableBinding t;
      t.table = tj.at("table").get<std::string>();
      if (tj.contains("node_type")) t.node_type = tj["node_type"].get<std::string>();
      if (tj.contains("edge_type")) t.edge_type = tj["edge_type"].get<std::string>();
      t.id_column = tj.value("id", "");
      t.label_column = tj.value("label", "");
      for (const auto &c : tj.value("attrs", Json::array())) {
        ColumnSpec col;
        col.column = c.at("column").get<std::string>();
        col.kind = ParseAttrKind(c.value("kind", "string"));
        col.attr = c.value("attr", col.column);
        t.attrs.push_back(std::move(col));
      }
      for (const auto &f : tj.value("foreign_keys", Json::array())) {
        ForeignKeySpec fk;
        fk.column = f.at("column").get<std::string>();
        fk.table = f.at("table").get<std::string>();
        fk.edge_type = f.at("edge_type").get<std::string>();
        fk.direction = ParseDirection(f.value("direction", "out"));
        t.foreign_keys.push_back(std::move(fk));
      }
      if (tj.contains("source")) t.source = EndpointFromJson(tj["source"]);
      if (tj.contains("target")) t.target = EndpointFromJson(tj["target"]);
      s.tables.push_back(std::move(t));
    }
    const Json categories = doc.value("event_categories", Json::object());
    for (const auto &[edge, category] : categories.items()) {
      s.event_categories[edge] = category.get<std::string>();
    }
  } catch (const Json::exception &e) {
    throw SchemaError(std::string("malformed schema document: ") + e.what());
  }
  s.Validate();
  return s;
}

OrderedJson SchemaMapping::ToJson() const {
  OrderedJson doc;
  doc["node_types"] = OrderedJson::array();
  for (const auto &nt : types.node_types()) {
    OrderedJson j{{"name", nt.name}, {"kind", NodeKindName(nt.kind)}};
    if (nt.kind == NodeKind::kEntity) j["role"] = EntityRoleName(nt.role);
    doc["node_types"].push_back(std::move(j));
  }
  doc["edge_types"] = OrderedJson::array();
  for (const auto &et : types.edge_types()) {
    OrderedJson j{{"name", et.name}, {"source", et.source_type}, {"target", et.target_type}};
    if (et.symmetric) j["symmetric"] = true;
    doc["edge_types"].push_back(std::move(j));
  }
  doc["tables"] = OrderedJson::array();
  for (const auto &t : tables) {
    OrderedJson j{{"table", t.table}};
    if (t.node_type) j["node_type"] = *t.node_type;
    if (t.edge_type) j["edge_type"] = *t.edge_type;
    if (!t.id_column.empty()) j["id"] = t.id_column;
    if (!t.label_column.empty()) j["label"] = t.label_column;
    j["attrs"] = OrderedJson::array();
    for (const auto &c : t.attrs) {
      j["attrs"].push_back(OrderedJson{{"column", c.column}, {"kind", AttrKindName(c.kind)}, {"attr", c.attr}});
    }
    if (t.node_type) {
      j["foreign_keys"] = OrderedJson::array();
      for (const auto &fk : t.foreign_keys) {
        j["foreign_keys"].push_back(OrderedJson{{"column", fk.column},
                                                {"table", fk.table},
                                                {"edge_type", fk.edge_type},
                                                {"direction", DirectionName(fk.direction)}});
      }
    } else {
      j["source"] = EndpointToJson(t.source);
      j["target"] = EndpointToJson(t.target);
    }
    doc["tables"].push_back(std::move(j));
  }
  doc["event_categories"] = OrderedJson::object();
  for (const auto &[edge, cat] : event_categories) doc["event_categories"][edge] = cat;
  return doc;
}

// ---- Ingestion -------------------------------------------------------------

IngestResult IngestGraph(const SchemaMapping &schema, std::span<const Record> records) {
  schema.Validate();
  GraphBuilder builder(schema.types);
  IngestResult result;

  std::vector<std::pair<const Record *, const TableBinding *>> bound;
  bound.reserve(records.size());
  for (const auto &rec : records) {
    const TableBinding *table = schema.FindTable(rec.table);
    if (table == nullptr) throw Error(ErrorCode::kUnknownTable, "unknown table \"" + rec.table + "\"");
    if (!rec.row.is_object()) throw SchemaError("row of table \"" + rec.table + "\" is not an object");
    bound.emplace_back(&rec, table);
  }

  auto require_id = [](const Record &rec, const std::string &column) {
    auto it = rec.row.find(column);
    std::optional<std::string> id;
    if (it != rec.row.end()) id = IdFromJson(*it);
    if (!id) throw SchemaError("row of table \"" + rec.table + "\" lacks id column \"" + column + "\"");
    return *id;
  };
  auto reject = [&result](const Record &rec, const Error &e) {
    result.rejects.push_back(Reject{Json{{"table", rec.table}, {"row", rec.row}},
                                    std::string(ErrorCodeName(e.code())) + ": " + e.what()});
  };

  // Nodes first so foreign keys may point forward in the stream.
  for (const auto &[rec, table] : bound) {
    if (!table->node_type) continue;
    std::string id = require_id(*rec, table->id_column);
    std::string label;
    if (!table->label_column.empty()) {
      auto it = rec->row.find(table->label_column);
      if (it != rec->row.end() && it->is_string()) label = it->get<std::string>();
    }
    const TypeIndex type = *schema.types.FindNodeType(*table->node_type);
    if (builder.AddNode(id, type, std::move(label), ReadAttrs(rec->row, table->attrs))) {
      result.warnings.push_back("duplicate node id \"" + id + "\" in table \"" + table->table +
                                "\": last write wins");
    }
  }

  auto check_ref = [&](const std::string &id, const std::string &table) {
    const TableBinding *ref = schema.FindTable(table);
    auto type = builder.NodeTypeOf(id);
    if (!type || *type != *schema.types.FindNodeType(*ref->node_type)) {
      throw Error(ErrorCode::kDanglingForeignKey,
                  "id \"" + id + "\" is not defined in table \"" + table + "\"");
    }
  };

  for (const auto &[rec, table] : bound) {
    if (table->node_type) {
      const std::string id = require_id(*rec, table->id_column);
      for (const auto &fk : table->foreign_keys) {
        auto it = rec->row.find(fk.column);
        if (it == rec->row.end() || it->is_null()) continue;
        auto ref = IdFromJson(*it);
        if (!ref) throw SchemaError("foreign key \"" + fk.column + "\" must be a string or integer id");
        const TypeIndex et = *schema.types.FindEdgeType(fk.edge_type);
        try {
          check_ref(*ref, fk.table);
          const std::string edge_id = table->table + "/" + id + "/" + fk.column;
          const bool out = fk.direction == Direction::kOut;
          builder.AddEdge(edge_id, et, out ? id : *ref, out ? *ref : id, {});
        } catch (const Error &e) {
          if (e.code() != ErrorCode::kDanglingForeignKey) throw;
          reject(*rec, e);
        }
      }
    } else {
      const TypeIndex et = *schema.types.FindEdgeType(*table->edge_type);
      auto src = rec->row.contains(table->source.column) ? IdFromJson(rec->row[table->source.column])
                                                         : std::nullopt;
      auto dst = rec->row.contains(table->target.column) ? IdFromJson(rec->row[table->target.column])
                                                         : std::nullopt;
      if (!src || !dst) throw SchemaError("edge row of table \"" + table->table + "\" lacks an endpoint");
      std::string edge_id = table->id_column.empty() ? table->table + "/" + *src + "/" + *dst
                                                     : require_id(*rec, table->id_column);
      try {
        check_ref(*src, table->source.table);
        check_ref(*dst, table->target.table);
        if (builder.AddEdge(edge_id, et, *src, *dst, ReadAttrs(rec->row, table->attrs))) {
          result.warnings.push_back("duplicate edge id \"" + edge_id + "\": last write wins");
        }
      } catch (const Error &e) {
        if (e.code() != ErrorCode::kDanglingForeignKey) throw;
        reject(*rec, e);
      }
    }
  }
  result.graph = std::move(builder).Build();
  return result;
}

std::vector<Record> ReadRecords(std::istream &in) {
  std::vector<Record> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("table") || !j["table"].is_string() ||
        !j.contains("row")) {
      throw SchemaError("line " + std::to_string(lineno) + ": expected {\"table\": str, \"row\": {...}}");
    }
    out.push_back(Record{j["table"].get<std::string>(), std::move(j["row"])});
  }
  return out;
}

void WriteRejects(std::ostream &out, std::span<const Reject> rejects) {
  for (const auto &r : rejects) {
    OrderedJson j;
    j["row"] = r.record;
    j["error"] = r.error;
    out << j.dump() << '\n';
  }
}

// ---- Export ----------------------------------------------------------------

Json AttrToJson(const AttrValue &value) {
  return std::visit(
      [](const auto &v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Year>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, GeoPoint>) {
          return Json::array({v.lat, v.lon});
        } else {
          return v;
        }
      },
      value);
}

OrderedJson AttrsToJson(const AttrMap &attrs) {
  OrderedJson j = OrderedJson::object();
  for (const auto &[k, v] : attrs) j[k] = AttrToJson(v);
  return j;
}

std::string_view NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kFigure:
      return "figure";
    case NodeKind::kEntity:
      return "entity";
    case NodeKind::kEvent:
      return "event";
  }
  return "entity";
}

std::string_view EntityRoleName(EntityRole role) {
  switch (role) {
    case EntityRole::kLocation:
      return "location";
    case EntityRole::kOffice:
      return "office";
    case EntityRole::kEntity:
      return "entity";
    case EntityRole::kNone:
      return "none";
  }
  return "none";
}

ExportedCorpus ExportGraph(const KnowledgeGraph &graph) {
  ExportedCorpus out;
  out.schema.types = graph.types();
  const auto &types = graph.types();

  // Column names carry the attribute kind so mixed-kind keys survive.
  auto column_of = [](const std::string &attr, const AttrValue &v) {
    return std::string(AttrKindName(KindOf(v))) + ":" + attr;
  };
  auto collect_columns = [&](auto &&items, auto &&type_of, TypeIndex type) {
    std::map<std::string, ColumnSpec> cols;
    for (const auto &item : items) {
      if (type_of(item) != type) continue;
      for (const auto &[k, v] : item.attrs) cols.try_emplace(column_of(k, v), ColumnSpec{column_of(k, v), KindOf(v), k});
    }
    std::vector<ColumnSpec> specs;
    for (auto &[name, spec] : cols) specs.push_back(std::move(spec));
    return specs;
  };
  auto row_attrs = [&](Json &row, const AttrMap &attrs) {
    for (const auto &[k, v] : attrs) row[column_of(k, v)] = AttrToJson(v);
  };

  for (TypeIndex t = 0; t < types.node_types().size(); ++t) {
    TableBinding tb;
    tb.table = "node:" + types.node_type(t).name;
    tb.node_type = types.node_type(t).name;
    tb.id_column = "id";
    tb.label_column = "label";
    tb.attrs = collect_columns(graph.nodes(), [](const Node &n) { return n.type; }, t);
    out.schema.tables.push_back(std::move(tb));
  }
  for (TypeIndex t = 0; t < types.edge_types().size(); ++t) {
    const auto &et = types.edge_type(t);
    TableBinding tb;
    tb.table = "edge:" + et.name;
    tb.edge_type = et.name;
    tb.id_column = "id";
    tb.source = EndpointSpec{"source", "node:" + et.source_type};
    tb.target = EndpointSpec{"target", "node:" + et.target_type};
    tb.attrs = collect_columns(graph.edges(), [](const Edge &e) { return e.type; }, t);
    out.schema.tables.push_back(std::move(tb));
  }
  for (const auto &n : graph.nodes()) {
    Json row{{"id", n.id}, {"label", n.label}};
    row_attrs(row, n.attrs);
    out.records.push_back(Record{"node:" + types.node_type(n.type).name, std::move(row)});
  }
  for (const auto &e : graph.edges()) {
    Json row{{"id", e.id}, {"source", graph.node(e.source).id}, {"target", graph.node(e.target).id}};
    row_attrs(row, e.attrs);
    out.records.push_back(Record{"edge:" + types.edge_type(e.type).name, std::move(row)});
  }
  return out;
}

}  // namespace cohort
