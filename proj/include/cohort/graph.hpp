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
#ifndef COHORT_GRAPH_HPP_
#define COHORT_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"

namespace cohort {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

enum class NodeKind { kFigure, kEntity, kEvent };

// What an entity node stands for when it shows up in a description.
enum class EntityRole { kNone, kLocation, kOffice, kEntity };

enum class Direction { kOut, kIn, kBoth };

struct NodeType {
  std::string name;
  NodeKind kind = NodeKind::kEntity;
  EntityRole role = EntityRole::kNone;
};

struct EdgeType {
  std::string name;
  std::string source_type;
  std::string target_type;
  // Undirected-style relation (kinship, friendship): traversable both ways.
  bool symmetric = false;
};

using TypeIndex = std::uint32_t;

// Node and edge type registries. Names are unique per registry and every
// edge type references registered node types.
class TypeRegistry {
 public:
  TypeIndex AddNodeType(NodeType type);
  TypeIndex AddEdgeType(EdgeType type);

  std::optional<TypeIndex> FindNodeType(std::string_view name) const;
  std::optional<TypeIndex> FindEdgeType(std::string_view name) const;

  const NodeType &node_type(TypeIndex i) const { return node_types_.at(i); }
  const EdgeType &edge_type(TypeIndex i) const { return edge_types_.at(i); }
  std::span<const NodeType> node_types() const { return node_types_; }
  std::span<const EdgeType> edge_types() const { return edge_types_; }

  TypeIndex edge_source(TypeIndex edge) const { return edge_endpoints_.at(edge).first; }
  TypeIndex edge_target(TypeIndex edge) const { return edge_endpoints_.at(edge).second; }

  // A relationship edge type links two figure-kind node types.
  bool IsRelationship(TypeIndex edge) const;

 private:
  std::vector<NodeType> node_types_;
  std::vector<EdgeType> edge_types_;
  std::vector<std::pair<TypeIndex, TypeIndex>> edge_endpoints_;
  std::unordered_map<std::string, TypeIndex> node_index_;
  std::unordered_map<std::string, TypeIndex> edge_index_;
};

struct Year {
  std::int64_t value = 0;  // negative = BCE
  auto operator<=>(const Year &) const = default;
};

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  auto operator<=>(const GeoPoint &) const = default;
};

using AttrValue = std::variant<std::string, std::int64_t, Year, GeoPoint>;
using AttrMap = std::map<std::string, AttrValue>;

enum class AttrKind { kString, kInteger, kYear, kGeo };

struct Node {
  std::string id;
  TypeIndex type = 0;
  std::string label;
  AttrMap attrs;
};

struct Edge {
  std::string id;
  TypeIndex type = 0;
  std::size_t source = 0;  // node index
  std::size_t target = 0;  // node index
  AttrMap attrs;
};

struct Neighbor {
  const Edge *edge = nullptr;
  const Node *node = nullptr;
};

class GraphBuilder;

// Typed property graph. Immutable once built; safe for concurrent readers.
// Nodes and edges are stored sorted by id.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  const TypeRegistry &types() const { return types_; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::optional<std::size_t> FindNode(std::string_view id) const;
  // Throws Error(kUnknownNode).
  std::size_t NodeIndex(std::string_view id) const;
  const Node &node(std::size_t index) const { return nodes_.at(index); }
  const Edge &edge(std::size_t index) const { return edges_.at(index); }
  const NodeType &TypeOf(const Node &n) const { return types_.node_type(n.type); }

  // Edge indices incident to `node` for one edge type, sorted by edge id.
  // kOut/kIn only; symmetric edge types are indexed in both directions.
  std::span<const std::size_t> Adjacent(std::size_t node, TypeIndex edge_type,
                                        Direction dir) const;

  // The endpoint of `edge` that is not `from` (or `from` for a self-loop).
  std::size_t Opposite(const Edge &edge, std::size_t from) const {
    return edge.source == from ? edge.target : edge.source;
  }

  // Typed neighborhood query ordered by edge id; each edge reported once.
  std::vector<Neighbor> Neighbors(std::string_view node,
                                  std::optional<std::string_view> edge_type,
                                  Direction dir) const;

  std::size_t Degree(std::size_t node) const;

  std::vector<std::size_t> NodesOfKind(NodeKind kind) const;

  // First Year-valued attribute of a node, preferring the key "year".
  static std::optional<std::int64_t> YearOf(const AttrMap &attrs);

 private:
  friend class GraphBuilder;

  struct Bucket {
    TypeIndex edge_type;
    Direction dir;
    std::vector<std::size_t> edges;
  };

  TypeRegistry types_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> node_index_;
  std::vector<std::vector<Bucket>> adjacency_;
};

// Mutable staging area for a KnowledgeGraph. Duplicate node ids are
// last-write-wins on label and attributes.
class GraphBuilder {
 public:
  explicit GraphBuilder(TypeRegistry types) : types_(std::move(types)) {}

  const TypeRegistry &types() const { return types_; }

  // Returns true when an existing node was overwritten.
  bool AddNode(std::string id, TypeIndex type, std::string label, AttrMap attrs);
  std::optional<TypeIndex> NodeTypeOf(std::string_view id) const;
  bool HasNode(std::string_view id) const { return NodeTypeOf(id).has_value(); }

  // Endpoints are node ids; type constraints are checked. Duplicate edge ids
  // overwrite. Throws Error(kSchemaViolation) on a type mismatch and
  // Error(kDanglingForeignKey) on a missing endpoint.
  bool AddEdge(std::string id, TypeIndex type, std::string_view source,
               std::string_view target, AttrMap attrs);

  KnowledgeGraph Build() &&;

 private:
  struct PendingNode {
    TypeIndex type;
    std::string label;
    AttrMap attrs;
  };
  struct PendingEdge {
    TypeIndex type;
    std::string source;
    std::string target;
    AttrMap attrs;
  };

  TypeRegistry types_;
  std::map<std::string, PendingNode, std::less<>> nodes_;
  std::map<std::string, PendingEdge, std::less<>> edges_;
};

// ---- Schema-driven ingestion ----------------------------------------------

struct ColumnSpec {
  std::string column;
  AttrKind kind = AttrKind::kString;
  std::string attr;  // attribute name; defaults to the column name
};

struct ForeignKeySpec {
  std::string column;
  std::string table;      // referenced table; must be node-bound
  std::string edge_type;
  // kOut: row node -> referenced node; kIn: referenced node -> row node.
  Direction direction = Direction::kOut;
};

struct EndpointSpec {
  std::string column;
  std::string table;
};

struct TableBinding {
  std::string table;
  // Exactly one of node_type / edge_type is set.
  std::optional<std::string> node_type;
  std::optional<std::string> edge_type;
  std::string id_column;  // required for node tables, optional for edge tables
  std::string label_column;
  std::vector<ColumnSpec> attrs;
  std::vector<ForeignKeySpec> foreign_keys;  // node tables
  EndpointSpec source;                       // edge tables
  EndpointSpec target;                       // edge tables
};

struct SchemaMapping {
  TypeRegistry types;
  std::vector<TableBinding> tables;
  // Event edge type -> exploration category (politics, academic, ...).
  std::map<std::string, std::string> event_categories;

  const TableBinding *FindTable(std::string_view name) const;

  // Throws Error(kSchemaViolation) / Error(kUnknownType).
  void Validate() const;

  static SchemaMapping FromJson(const Json &doc);
  OrderedJson ToJson() const;
};

struct Record {
  std::string table;
  Json row;
};

struct Reject {
  Json record;
  std::string error;
};

struct IngestResult {
  KnowledgeGraph graph;
  std::vector<Reject> rejects;
  std::vector<std::string> warnings;
};

// Rows of node-bound tables become nodes; every foreign key of a node row and
// every edge-table row becomes one edge. Dangling references are quarantined
// in `rejects`. Throws Error(kUnknownTable) and Error(kSchemaViolation).
IngestResult IngestGraph(const SchemaMapping &schema, std::span<const Record> records);

std::vector<Record> ReadRecords(std::istream &in);
void WriteRejects(std::ostream &out, std::span<const Reject> rejects);

struct ExportedCorpus {
  SchemaMapping schema;
  std::vector<Record> records;
};

// Dumps a graph as one generic table per node type and per edge type; the
// result re-ingests into an isomorphic graph.
ExportedCorpus ExportGraph(const KnowledgeGraph &graph);

Json AttrToJson(const AttrValue &value);
OrderedJson AttrsToJson(const AttrMap &attrs);
std::string_view NodeKindName(NodeKind kind);
std::string_view EntityRoleName(EntityRole role);

}  // namespace cohort

#endif  // COHORT_GRAPH_HPP_
