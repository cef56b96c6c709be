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
#include "cohort/community.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>

#include "cohort/error.hpp"

namespace cohort {

namespace {

std::vector<std::size_t> Canonicalize(const std::vector<std::size_t> &raw, std::size_t &count) {
  std::map<std::size_t, std::size_t> relabel;
  std::vector<std::size_t> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = relabel.try_emplace(raw[i], relabel.size());
    out[i] = it->second;
  }
  count = relabel.size();
  return out;
}

struct Adjacency {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;  // (neighbor, edge)
};

Adjacency BuildAdjacency(const UndirectedGraph &g, const std::vector<bool> &alive) {
  Adjacency adj;
  adj.out.resize(g.node_count);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (!alive[e]) continue;
    adj.out[g.edges[e].u].emplace_back(g.edges[e].v, e);
    adj.out[g.edges[e].v].emplace_back(g.edges[e].u, e);
  }
  return adj;
}

}  // namespace

UndirectedGraph UndirectedGraph::Simple(std::size_t node_count, std::span<const WeightedEdge> edges) {
  std::map<std::pair<std::size_t, std::size_t>, double> merged;
  for (const auto &e : edges) {
    if (e.u == e.v) continue;
    merged[{std::min(e.u, e.v), std::max(e.u, e.v)}] += e.weight;
  }
  UndirectedGraph g;
  g.node_count = node_count;
  for (const auto &[key, w] : merged) g.edges.push_back({key.first, key.second, w});
  return g;
}

std::vector<double> EdgeBetweenness(const UndirectedGraph &g, const std::vector<bool> &alive) {
  const std::size_t n = g.node_count;
  const Adjacency adj = BuildAdjacency(g, alive);
  std::vector<double> score(g.edges.size(), 0.0);
  std::vector<double> sigma(n);
  std::vector<double> delta(n);
  std::vector<long> dist(n);
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    order.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      order.push_back(v);
      for (const auto &[w, e] : adj.out[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
        if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t w = *it;
      for (const auto &[v, e] : adj.out[w]) {
        if (dist[v] == dist[w] - 1) {
          const double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
          score[e] += c;
          delta[v] += c;
        }
      }
    }
  }
  for (double &x : score) x /= 2.0;
  return score;
}

std::vector<std::size_t> ConnectedComponents(const UndirectedGraph &g, const std::vector<bool> &alive) {
  std::vector<std::size_t> parent(g.node_count);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (!alive[e]) continue;
    const std::size_t a = find(g.edges[e].u);
    const std::size_t b = find(g.edges[e].v);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> roots(g.node_count);
  for (std::size_t i = 0; i < roots.size(); ++i) roots[i] = find(i);
  std::size_t count = 0;
  return Canonicalize(roots, count);
}

double Modularity(const UndirectedGraph &g, std::span<const std::size_t> community) {
  const double m = static_cast<double>(g.edges.size());
  if (m == 0.0) return 0.0;
  std::map<std::size_t, double> internal;
  std::map<std::size_t, double> degree;
  for (const auto &e : g.edges) {
    degree[community[e.u]] += 1.0;
    degree[community[e.v]] += 1.0;
    if (community[e.u] == community[e.v]) internal[community[e.u]] += 1.0;
  }
  double q = 0.0;
  for (const auto &[c, d] : degree) {
    const double share = d / (2.0 * m);
    q += internal[c] / m - share * share;
  }
  return q;
}

Partition GirvanNewman(const UndirectedGraph &g, std::optional<std::size_t> target) {
  if (g.node_count > kMaxCommunityNodes) {
    throw Error(ErrorCode::kGraphTooLarge, "community detection limited to " + std::to_string(kMaxCommunityNodes) +
                                               " nodes, got " + std::to_string(g.node_count));
  }
  std::vector<bool> alive(g.edges.size(), true);
  auto snapshot = [&]() {
    Partition p;
    p.community = Canonicalize(ConnectedComponents(g, alive), p.count);
    p.modularity = Modularity(g, p.community);
    return p;
  };
  Partition current = snapshot();
  Partition best = current;
  if (target && current.count >= *target) return current;
  std::size_t remaining = g.edges.size();
  while (remaining > 0) {
    const auto score = EdgeBetweenness(g, alive);
    std::size_t pick = g.edges.size();
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      if (!alive[e]) continue;
      if (pick == g.edges.size() || score[e] > score[pick] + 1e-9 * std::max(1.0, std::fabs(score[pick]))) {
        pick = e;
      }
    }
    alive[pick] = false;
    --remaining;
    Partition next = snapshot();
    if (next.count == current.count) continue;
    current = std::move(next);
    if (target && current.count >= *target) return current;
    if (current.modularity > best.modularity + 1e-12) best = current;
  }
  return target ? current : best;
}

Partition StronglyConnected(std::size_t node_count, std::span<const std::pair<std::size_t, std::size_t>> arcs) {
  std::vector<std::vector<std::size_t>> out(node_count);
  for (const auto &[a, b] : arcs) out[a].push_back(b);
  std::vector<long> index(node_count, -1);
  std::vector<long> low(node_count, 0);
  std::vector<bool> on_stack(node_count, false);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> comp(node_count, 0);
  long counter = 0;
  std::size_t next_comp = 0;
  std::function<void(std::size_t)> strong = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : out[v]) {
      if (index[w] < 0) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::size_t w = 0;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = next_comp;
      } while (w != v);
      ++next_comp;
    }
  };
  for (std::size_t v = 0; v < node_count; ++v) {
    if (index[v] < 0) strong(v);
  }
  Partition p;
  p.community = Canonicalize(comp, p.count);
  return p;
}

}  // namespace cohort
