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
#include "cohort/extract.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "cohort/community.hpp"

namespace cohort {

namespace {

std::vector<std::string> Normalized(std::span<const std::string> figures) {
  std::vector<std::string> out(figures.begin(), figures.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Feature WithSupport(Feature f, const DescriptionStore &store, std::span<const std::string> figures) {
  f.support = SupportOf(f, figures, store);
  return f;
}

// Distinct selected figures linked to each co-mentioned node.
template <typename TokensOf>
std::map<std::string, std::set<std::string>> LinkCounts(const DescriptionStore &store,
                                                        std::span<const std::string> figures, TokensOf tokens_of) {
  std::map<std::string, std::set<std::string>> links;
  for (const auto &fig : figures) {
    for (const auto &d : store.For(fig)) {
      tokens_of(d.tokens, [&](const std::string &node) {
        if (node != fig) links[node].insert(fig);
      });
    }
  }
  return links;
}

using Bits = std::vector<std::uint64_t>;

}  // namespace

std::vector<YearCluster> Dbscan1D(std::span<const std::int64_t> years, std::int64_t eps, std::size_t min_pts) {
  std::vector<std::int64_t> v(years.begin(), years.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  // Neighborhood of i is the index range [lo[i], hi[i]).
  std::vector<std::size_t> lo(n);
  std::vector<std::size_t> hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), v[i] - eps) - v.begin());
    hi[i] = static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), v[i] + eps) - v.begin());
  }
  auto core = [&](std::size_t i) { return hi[i] - lo[i] >= min_pts; };

  constexpr long kUnvisited = -2;
  constexpr long kNoise = -1;
  std::vector<long> label(n, kUnvisited);
  std::vector<YearCluster> clusters;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    if (!core(i)) {
      label[i] = kNoise;
      continue;
    }
    const long c = static_cast<long>(clusters.size());
    clusters.push_back({v[i], v[i], 0});
    label[i] = c;
    // Every index below i is already visited, so the cluster grows rightwards
    // and each index needs scanning at most once.
    std::size_t scanned = lo[i];
    std::vector<std::size_t> frontier{i};
    while (!frontier.empty()) {
      const std::size_t j = frontier.back();
      frontier.pop_back();
      for (std::size_t k = std::max(lo[j], scanned); k < hi[j]; ++k) {
        if (label[k] == kNoise) {
          label[k] = c;
        } else if (label[k] == kUnvisited) {
          label[k] = c;
          if (core(k)) frontier.push_back(k);
        }
      }
      scanned = std::max(scanned, hi[j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] < 0) continue;
    auto &cl = clusters[static_cast<std::size_t>(label[i])];
    cl.lo = std::min(cl.lo, v[i]);
    cl.hi = std::max(cl.hi, v[i]);
    ++cl.size;
  }
  return clusters;
}

std::vector<Feature> ExtractTimeRanges(const DescriptionStore &store, std::span<const std::string> figures,
                                       const TimeRangeParams &params) {
  const auto figs = Normalized(figures);
  std::vector<std::int64_t> years;
  for (const auto &f : figs) {
    for (const auto &d : store.For(f)) years.insert(years.end(), d.tokens.years.begin(), d.tokens.years.end());
  }
  std::vector<Feature> out;
  if (years.empty()) return out;
  const double total = static_cast<double>(years.size());
  auto clusters = Dbscan1D(years, params.eps_years, params.min_pts);
  std::sort(clusters.begin(), clusters.end(), [](const auto &a, const auto &b) { return a.lo < b.lo; });
  for (const auto &c : clusters) {
    if (static_cast<double>(c.size) > params.occurrence_ratio * total) {
      out.push_back(WithSupport(Feature::Atomic(Atom::TimeRange(c.lo, c.hi)), store, figs));
    }
  }
  return out;
}

std::vector<Feature> ExtractTopK(const DescriptionStore &store, std::span<const std::string> figures,
                                 FeatureKind kind, std::size_t k) {
  const auto figs = Normalized(figures);
  std::map<std::string, std::size_t> counts;
  for (const auto &f : figs) {
    for (const auto &d : store.For(f)) {
      const auto &tokens = kind == FeatureKind::kLocation ? d.tokens.locations : d.tokens.offices;
      for (const auto &t : tokens) ++counts[t];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) { return a.second > b.second; });
  std::vector<Feature> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    out.push_back(WithSupport(Feature::Atomic(Atom::Of(kind, ranked[i].first)), store, figs));
  }
  return out;
}

std::vector<Feature> ExtractRelationships(const DescriptionStore &store, std::span<const std::string> figures,
                                          const RelationshipParams &params) {
  const auto figs = Normalized(figures);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < figs.size(); ++i) index.emplace(figs[i], i);

  struct Link {
    std::size_t a;
    std::size_t b;
    std::string type;
  };
  std::vector<Link> links;
  for (const auto &f : figs) {
    for (const auto &d : store.For(f)) {
      for (const auto &r : d.tokens.relationships) {
        auto a = index.find(r.source);
        auto b = index.find(r.target);
        if (a == index.end() || b == index.end() || a->second == b->second) continue;
        links.push_back({a->second, b->second, r.type});
      }
    }
  }
  std::vector<Feature> out;
  if (links.empty()) return out;

  Partition part;
  if (params.directed_scc) {
    std::vector<std::pair<std::size_t, std::size_t>> arcs;
    for (const auto &l : links) arcs.emplace_back(l.a, l.b);
    part = StronglyConnected(figs.size(), arcs);
  } else {
    std::vector<WeightedEdge> edges;
    for (const auto &l : links) edges.push_back({l.a, l.b, 1.0});
    part = GirvanNewman(UndirectedGraph::Simple(figs.size(), edges));
  }
  std::vector<std::size_t> sizes(part.count, 0);
  for (std::size_t c : part.community) ++sizes[c];
  std::set<std::string> types;
  for (const auto &l : links) {
    const std::size_t c = part.community[l.a];
    if (c == part.community[l.b] && sizes[c] > params.min_community) types.insert(l.type);
  }
  for (const auto &t : types) {
    out.push_back(WithSupport(Feature::Atomic(Atom::Of(FeatureKind::kRelationship, t)), store, figs));
  }
  return out;
}

std::vector<Feature> ExtractCelebrities(const DescriptionStore &store, std::span<const std::string> figures,
                                        double link_ratio) {
  const auto figs = Normalized(figures);
  auto links = LinkCounts(store, figs, [](const DescriptionTokens &t, auto &&emit) {
    for (const auto &c : t.co_figures) emit(c);
  });
  std::vector<Feature> out;
  const double bar = link_ratio * static_cast<double>(figs.size());
  for (const auto &[person, linked] : links) {
    if (static_cast<double>(linked.size()) > bar) {
      out.push_back(WithSupport(Feature::Atomic(Atom::Of(FeatureKind::kCelebrity, person)), store, figs));
    }
  }
  return out;
}

std::vector<Feature> ExtractEntities(const DescriptionStore &store, std::span<const std::string> figures,
                                     const std::set<std::string> &covered, double link_ratio) {
  const auto figs = Normalized(figures);
  auto links = LinkCounts(store, figs, [](const DescriptionTokens &t, auto &&emit) {
    for (const auto &e : t.entities) emit(e);
    for (const auto &e : t.locations) emit(e);
    for (const auto &e : t.offices) emit(e);
  });
  std::vector<Feature> out;
  const double bar = link_ratio * static_cast<double>(figs.size());
  for (const auto &[entity, linked] : links) {
    if (covered.count(entity) || static_cast<double>(linked.size()) <= bar) continue;
    out.push_back(WithSupport(Feature::Atomic(Atom::Of(FeatureKind::kEntity, entity)), store, figs));
  }
  return out;
}

std::vector<Feature> ComposeFeatures(std::span<const Feature> atomics, const DescriptionStore &store,
                                     std::span<const std::string> figures, const ComposeParams &params) {
  const auto figs = Normalized(figures);
  std::vector<const Description *> descs;
  std::vector<std::size_t> owner;
  for (std::size_t fi = 0; fi < figs.size(); ++fi) {
    for (const auto &d : store.For(figs[fi])) {
      descs.push_back(&d);
      owner.push_back(fi);
    }
  }
  const std::size_t words = (descs.size() + 63) / 64;
  std::vector<Bits> bits(atomics.size(), Bits(words, 0));
  for (std::size_t a = 0; a < atomics.size(); ++a) {
    for (std::size_t d = 0; d < descs.size(); ++d) {
      if (Matches(atomics[a], *descs[d])) bits[a][d / 64] |= std::uint64_t{1} << (d % 64);
    }
  }
  auto figures_of = [&](const Bits &b) {
    std::vector<std::size_t> hit;
    for (std::size_t w = 0; w < words; ++w) {
      for (std::uint64_t x = b[w]; x != 0; x &= x - 1) {
        const std::size_t d = w * 64 + static_cast<std::size_t>(__builtin_ctzll(x));
        if (hit.empty() || hit.back() != owner[d]) hit.push_back(owner[d]);
      }
    }
    return hit;  // owners are non-decreasing in description order
  };
  auto conj = [&](const Bits &x, const Bits &y) {
    Bits out(words);
    for (std::size_t w = 0; w < words; ++w) out[w] = x[w] & y[w];
    return out;
  };

  const double bar = params.min_joint_support_ratio * static_cast<double>(figs.size());
  auto passes = [&](const std::vector<std::size_t> &hit) {
    return !hit.empty() && static_cast<double>(hit.size()) >= bar;
  };

  struct Candidate {
    Feature feature;
    std::size_t joint;
  };
  std::vector<Candidate> found;
  auto emit = [&](std::vector<std::size_t> parts_idx, const std::vector<std::size_t> &hit) {
    std::vector<Atom> parts;
    for (std::size_t i : parts_idx) parts.push_back(atomics[i].parts().front());
    Feature f = Feature::Composite(std::move(parts));
    for (std::size_t fi : hit) f.support.push_back(figs[fi]);
    found.push_back({std::move(f), hit.size()});
  };
  auto distinct = [&](std::size_t i, std::size_t j) {
    return !atomics[i].parts().front().SamePayload(atomics[j].parts().front());
  };

  const std::size_t n = atomics.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (atomics[i].is_composite()) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (atomics[j].is_composite() || !distinct(i, j)) continue;
      const Bits ij = conj(bits[i], bits[j]);
      const auto hit_ij = figures_of(ij);
      if (!passes(hit_ij)) continue;  // supersets can only shrink
      emit({i, j}, hit_ij);
      if (params.max_arity < 3) continue;
      for (std::size_t k = j + 1; k < n; ++k) {
        if (atomics[k].is_composite() || !distinct(i, k) || !distinct(j, k)) continue;
        const auto hit = figures_of(conj(ij, bits[k]));
        if (passes(hit)) emit({i, j, k}, hit);
      }
    }
  }
  std::sort(found.begin(), found.end(), [](const Candidate &a, const Candidate &b) {
    if (a.joint != b.joint) return a.joint > b.joint;
    return a.feature.id() < b.feature.id();
  });
  found.erase(std::unique(found.begin(), found.end(),
                          [](const Candidate &a, const Candidate &b) { return a.feature == b.feature; }),
              found.end());
  std::vector<Feature> out;
  for (std::size_t i = 0; i < found.size() && i < params.max_output; ++i) out.push_back(std::move(found[i].feature));
  return out;
}

std::vector<Feature> ExtractedFeatures::All() const {
  std::vector<Feature> all = atomics;
  all.insert(all.end(), composites.begin(), composites.end());
  return all;
}

ExtractedFeatures ExtractAll(const DescriptionStore &store, std::span<const std::string> figures,
                             const ExtractionParams &params) {
  const auto figs = Normalized(figures);
  ExtractedFeatures out;
  std::unordered_set<std::string> seen;
  auto take = [&](std::vector<Feature> batch) {
    for (auto &f : batch) {
      if (seen.insert(f.id()).second) out.atomics.push_back(std::move(f));
    }
  };
  take(ExtractTimeRanges(store, figs, params.time_range));
  take(ExtractTopK(store, figs, FeatureKind::kLocation, params.top_k));
  take(ExtractTopK(store, figs, FeatureKind::kAffiliation, params.top_k));
  take(ExtractRelationships(store, figs, params.relationship));
  take(ExtractCelebrities(store, figs, params.celebrity_link_ratio));
  std::set<std::string> covered;
  for (const auto &f : out.atomics) {
    if (f.kind() != FeatureKind::kTimeRange) covered.insert(f.parts().front().ref);
  }
  take(ExtractEntities(store, figs, covered, params.entity_link_ratio));
  out.composites = ComposeFeatures(out.atomics, store, figs, params.compose);
  return out;
}

}  // namespace cohort
