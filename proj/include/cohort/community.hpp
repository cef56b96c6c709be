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
#ifndef COHORT_COMMUNITY_HPP_
#define COHORT_COMMUNITY_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace cohort {

// Exact betweenness is cubic-ish; larger inputs are rejected.
inline constexpr std::size_t kMaxCommunityNodes = 2000;

struct WeightedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 1.0;
};

// Simple undirected graph; the edge id is its index in `edges`.
struct UndirectedGraph {
  std::size_t node_count = 0;
  std::vector<WeightedEdge> edges;

  // Merges parallel edges (summing weights), drops self-loops and orders edges
  // by (min endpoint, max endpoint).
  static UndirectedGraph Simple(std::size_t node_count, std::span<const WeightedEdge> edges);
};

struct Partition {
  std::vector<std::size_t> community;  // per node, numbered by first member
  std::size_t count = 0;
  double modularity = 0.0;
};

// Shortest-path edge betweenness over edges with alive[e] set, ignoring
// weights. Each unordered node pair contributes once.
std::vector<double> EdgeBetweenness(const UndirectedGraph &g, const std::vector<bool> &alive);

std::vector<std::size_t> ConnectedComponents(const UndirectedGraph &g, const std::vector<bool> &alive);

// Newman modularity of a partition against the full (unweighted) graph.
double Modularity(const UndirectedGraph &g, std::span<const std::size_t> community);

// Repeatedly removes the highest-betweenness edge (ties: lowest edge id).
// Stops once `target` components exist; without a target returns the
// maximum-modularity partition seen (ties: fewest communities).
// Throws Error(kGraphTooLarge) above kMaxCommunityNodes nodes.
Partition GirvanNewman(const UndirectedGraph &g, std::optional<std::size_t> target = std::nullopt);

// Tarjan SCCs of a directed graph, labelled by first member like Partition.
Partition StronglyConnected(std::size_t node_count, std::span<const std::pair<std::size_t, std::size_t>> arcs);

}  // namespace cohort

#endif  // COHORT_COMMUNITY_HPP_
