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
#ifndef COHORT_TESTS_ORACLES_HPP_
#define COHORT_TESTS_ORACLES_HPP_

// Brute-force reference implementations. They share no code with the
// library and favour obviousness over speed.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace cohort::oracle {

// PMI from raw membership sets over a universe of `n` figures.
inline double Pmi(const std::set<std::size_t> &a, const std::set<std::size_t> &b, std::size_t n) {
  const double u = static_cast<double>(n);
  std::size_t joint = 0;
  for (std::size_t x : a) joint += b.count(x);
  const double pa = static_cast<double>(a.size()) / u;
  const double pb = static_cast<double>(b.size()) / u;
  const double pj = joint == 0 ? 1.0 / (2.0 * u) : static_cast<double>(joint) / u;
  return std::log(pj / (pa * pb));
}

inline double Fitness(const std::vector<std::set<std::size_t>> &supports, std::size_t n,
                      const std::vector<std::size_t> &group, double alpha) {
  const double k = static_cast<double>(group.size());
  const double f = static_cast<double>(supports.size());
  double relevance = 0.0;
  for (std::size_t i : group) {
    for (std::size_t j = 0; j < supports.size(); ++j) {
      if (j != i) relevance += Pmi(supports[i], supports[j], n);
    }
  }
  relevance /= k * f;
  double redundancy = 0.0;
  for (std::size_t i : group) {
    for (std::size_t j : group) {
      if (i != j) redundancy += Pmi(supports[i], supports[j], n);
    }
  }
  redundancy /= k * k;
  return alpha * relevance - redundancy;
}

// Best fitness over every k-subset.
inline double ExhaustiveBest(const std::vector<std::set<std::size_t>> &supports, std::size_t n, std::size_t k,
                             double alpha) {
  std::vector<bool> pick(supports.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(k), true);
  double best = -INFINITY;
  do {
    std::vector<std::size_t> g;
    for (std::size_t i = 0; i < pick.size(); ++i) {
      if (pick[i]) g.push_back(i);
    }
    best = std::max(best, Fitness(supports, n, g, alpha));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

struct Cluster {
  std::int64_t lo;
  std::int64_t hi;
  std::size_t size;
};

// Textbook DBSCAN with a seed queue and O(n^2) region queries. Points are
// visited in ascending value order.
inline std::vector<Cluster> Dbscan(std::vector<std::int64_t> pts, std::int64_t eps, std::size_t min_pts) {
  std::sort(pts.begin(), pts.end());
  const std::size_t n = pts.size();
  auto region = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j) {
      const std::int64_t d = pts[i] > pts[j] ? pts[i] - pts[j] : pts[j] - pts[i];
      if (d <= eps) out.push_back(j);
    }
    return out;
  };
  constexpr int kUndefined = -2;
  constexpr int kNoise = -1;
  std::vector<int> label(n, kUndefined);
  int c = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (label[p] != kUndefined) continue;
    auto nb = region(p);
    if (nb.size() < min_pts) {
      label[p] = kNoise;
      continue;
    }
    label[p] = c;
    std::deque<std::size_t> seeds(nb.begin(), nb.end());
    while (!seeds.empty()) {
      const std::size_t q = seeds.front();
      seeds.pop_front();
      if (label[q] == kNoise) label[q] = c;
      if (label[q] != kUndefined) continue;
      label[q] = c;
      auto nq = region(q);
      if (nq.size() >= min_pts) seeds.insert(seeds.end(), nq.begin(), nq.end());
    }
    ++c;
  }
  std::vector<Cluster> out(static_cast<std::size_t>(c), Cluster{INT64_MAX, INT64_MIN, 0});
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] < 0) continue;
    auto &cl = out[static_cast<std::size_t>(label[i])];
    cl.lo = std::min(cl.lo, pts[i]);
    cl.hi = std::max(cl.hi, pts[i]);
    ++cl.size;
  }
  return out;
}

// Year ranges whose cluster holds more than `ratio` of all mentions, by lo.
inline std::vector<std::pair<std::int64_t, std::int64_t>> TimeRanges(const std::vector<std::int64_t> &years,
                                                                     std::int64_t eps, std::size_t min_pts,
                                                                     double ratio) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (const auto &c : Dbscan(years, eps, min_pts)) {
    if (static_cast<double>(c.size) > ratio * static_cast<double>(years.size())) out.emplace_back(c.lo, c.hi);
  }
  std::sort(out.begin(), out.end());
  return out;
}

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

// Components labelled by first member.
inline std::vector<std::size_t> Components(std::size_t n, const EdgeList &edges, const std::vector<bool> &alive) {
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!alive[e]) continue;
    const std::size_t a = find(edges[e].first);
    const std::size_t b = find(edges[e].second);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<std::size_t, std::size_t> ids;
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    auto it = ids.find(r);
    if (it == ids.end()) it = ids.emplace(r, ids.size()).first;
    out[i] = it->second;
  }
  return out;
}

// Betweenness from all-pairs BFS distances and path counts: a shortest s-t
// path crosses u-v iff d(s,u) + 1 + d(v,t) = d(s,t).
inline std::vector<double> Betweenness(std::size_t n, const EdgeList &edges, const std::vector<bool> &alive) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!alive[e]) continue;
    adj[edges[e].first].push_back(edges[e].second);
    adj[edges[e].second].push_back(edges[e].first);
  }
  constexpr std::size_t kInf = static_cast<std::size_t>(-1);
  std::vector<std::vector<std::size_t>> dist(n, std::vector<std::size_t>(n, kInf));
  std::vector<std::vector<double>> sigma(n, std::vector<double>(n, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    dist[s][s] = 0;
    sigma[s][s] = 1.0;
    std::deque<std::size_t> q{s};
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop_front();
      for (std::size_t v : adj[u]) {
        if (dist[s][v] == kInf) {
          dist[s][v] = dist[s][u] + 1;
          q.push_back(v);
        }
        if (dist[s][v] == dist[s][u] + 1) sigma[s][v] += sigma[s][u];
      }
    }
  }
  std::vector<double> out(edges.size(), 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!alive[e]) continue;
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t t = s + 1; t < n; ++t) {
        if (dist[s][t] == kInf) continue;
        for (int flip = 0; flip < 2; ++flip) {
          const std::size_t u = flip ? edges[e].second : edges[e].first;
          const std::size_t v = flip ? edges[e].first : edges[e].second;
          if (dist[s][u] != kInf && dist[v][t] != kInf && dist[s][u] + 1 + dist[v][t] == dist[s][t]) {
            out[e] += sigma[s][u] * sigma[v][t] / sigma[s][t];
          }
        }
      }
    }
  }
  return out;
}

inline double Modularity(std::size_t n, const EdgeList &edges, const std::vector<std::size_t> &community) {
  const double m = static_cast<double>(edges.size());
  if (m == 0) return 0.0;
  double q = 0.0;
  std::vector<double> degree(n, 0.0);
  for (const auto &[u, v] : edges) {
    degree[u] += 1;
    degree[v] += 1;
  }
  // Newman: (1/2m) sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j).
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (community[i] != community[j]) continue;
      double a = 0.0;
      for (const auto &[u, v] : edges) {
        if ((u == i && v == j) || (u == j && v == i)) a += 1.0;
      }
      q += a - degree[i] * degree[j] / (2.0 * m);
    }
  }
  return q / (2.0 * m);
}

// Divisive betweenness removal; the highest-betweenness edge goes first, ties
// to the lowest (min endpoint, max endpoint). Returns the maximum-modularity
// partition seen, preferring fewer communities on ties.
inline std::vector<std::size_t> GirvanNewman(std::size_t n, EdgeList edges) {
  for (auto &e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  edges.erase(std::remove_if(edges.begin(), edges.end(), [](const auto &e) { return e.first == e.second; }),
              edges.end());
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<bool> alive(edges.size(), true);
  auto best = Components(n, edges, alive);
  double best_q = Modularity(n, edges, best);
  std::size_t count = *std::max_element(best.begin(), best.end()) + 1;
  for (std::size_t round = 0; round < edges.size(); ++round) {
    const auto b = Betweenness(n, edges, alive);
    std::size_t pick = edges.size();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!alive[e]) continue;
      if (pick == edges.size() || b[e] > b[pick] + 1e-9 * std::max(1.0, std::fabs(b[pick]))) pick = e;
    }
    alive[pick] = false;
    const auto part = Components(n, edges, alive);
    const std::size_t c = *std::max_element(part.begin(), part.end()) + 1;
    if (c == count) continue;
    count = c;
    const double q = Modularity(n, edges, part);
    if (q > best_q + 1e-12) {
      best_q = q;
      best = part;
    }
  }
  return best;
}

// Least squares without intercept via the normal equations.
inline std::vector<double> NormalEquations(const std::vector<std::vector<double>> &x, const std::vector<double> &y) {
  const auto rows = static_cast<Eigen::Index>(x.size());
  const auto cols = static_cast<Eigen::Index>(x.front().size());
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd w = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  return {w.data(), w.data() + w.size()};
}

}  // namespace cohort::oracle

#endif  // COHORT_TESTS_ORACLES_HPP_
