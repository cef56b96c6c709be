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
#include "cohort/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "cohort/error.hpp"
#include "cohort/random.hpp"

namespace cohort {

namespace {

std::size_t Popcount(const std::vector<std::uint64_t> &b) {
  std::size_t n = 0;
  for (auto w : b) n += static_cast<std::size_t>(__builtin_popcountll(w));
  return n;
}

std::vector<std::uint64_t> ToBits(const std::vector<std::size_t> &members, std::size_t universe) {
  std::vector<std::uint64_t> bits((universe + 63) / 64, 0);
  for (std::size_t m : members) {
    if (m >= universe) throw Error(ErrorCode::kInvalidArgument, "support index outside universe");
    bits[m / 64] |= std::uint64_t{1} << (m % 64);
  }
  return bits;
}

using Genome = std::vector<std::size_t>;

}  // namespace

FeatureSet::FeatureSet(std::vector<Feature> features, std::span<const std::string> universe,
                       const DescriptionStore &store)
    : features_(std::move(features)), universe_size_(universe.size()) {
  std::vector<std::string> figs(universe.begin(), universe.end());
  std::sort(figs.begin(), figs.end());
  figs.erase(std::unique(figs.begin(), figs.end()), figs.end());
  universe_size_ = figs.size();
  for (const auto &f : features_) {
    std::vector<std::size_t> members;
    for (std::size_t u = 0; u < figs.size(); ++u) {
      for (const auto &d : store.For(figs[u])) {
        if (Matches(f, d)) {
          members.push_back(u);
          break;
        }
      }
    }
    bits_.push_back(ToBits(members, universe_size_));
  }
  Precompute();
}

FeatureSet::FeatureSet(std::vector<Feature> features, std::vector<std::vector<std::size_t>> supports,
                       std::size_t universe_size)
    : features_(std::move(features)), universe_size_(universe_size) {
  if (supports.size() != features_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one support set per feature required");
  }
  for (const auto &s : supports) bits_.push_back(ToBits(s, universe_size_));
  Precompute();
}

void FeatureSet::Precompute() {
  const std::size_t n = features_.size();
  counts_.resize(n);
  for (std::size_t i = 0; i < n; ++i) counts_[i] = Popcount(bits_[i]);
  pmi_.assign(n * n, std::numeric_limits<double>::quiet_NaN());
  row_sums_.assign(n, std::numeric_limits<double>::quiet_NaN());
  if (universe_size_ == 0) return;
  const double u = static_cast<double>(universe_size_);
  const double eps = 1.0 / (2.0 * u);
  for (std::size_t i = 0; i < n; ++i) {
    if (counts_[i] == 0) continue;
    for (std::size_t j = i; j < n; ++j) {
      if (counts_[j] == 0) continue;
      double joint = static_cast<double>(joint_count(i, j)) / u;
      if (joint == 0.0) joint = eps;
      const double v = std::log(joint / (p(i) * p(j)));
      pmi_[i * n + j] = v;
      pmi_[j * n + i] = v;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) s += pmi_[i * n + j];
    }
    row_sums_[i] = s;
  }
}

std::size_t FeatureSet::joint_count(std::size_t i, std::size_t j) const {
  const auto &a = bits_.at(i);
  const auto &b = bits_.at(j);
  std::size_t n = 0;
  for (std::size_t w = 0; w < a.size(); ++w) n += static_cast<std::size_t>(__builtin_popcountll(a[w] & b[w]));
  return n;
}

double FeatureSet::p(std::size_t i) const {
  return universe_size_ == 0 ? 0.0 : static_cast<double>(counts_.at(i)) / static_cast<double>(universe_size_);
}

double FeatureSet::p_joint(std::size_t i, std::size_t j) const {
  return universe_size_ == 0 ? 0.0 : static_cast<double>(joint_count(i, j)) / static_cast<double>(universe_size_);
}

double FeatureSet::Pmi(std::size_t i, std::size_t j) const {
  for (std::size_t x : {i, j}) {
    if (counts_.at(x) == 0) {
      throw Error(ErrorCode::kZeroMarginal, "feature " + features_[x].id() + " has no support in the universe");
    }
  }
  return pmi_[i * features_.size() + j];
}

double FeatureSet::PmiRowSum(std::size_t i) const {
  if (std::isnan(row_sums_.at(i))) {
    for (std::size_t j = 0; j < size(); ++j) Pmi(i, j);  // throws on the offending marginal
  }
  return row_sums_[i];
}

double Redundancy(const FeatureSet &set, std::span<const std::size_t> group) {
  if (group.size() < 2) throw Error(ErrorCode::kInvalidArgument, "redundancy needs at least two features");
  double s = 0.0;
  for (std::size_t a = 0; a < group.size(); ++a) {
    for (std::size_t b = 0; b < group.size(); ++b) {
      if (group[a] != group[b]) s += set.Pmi(group[a], group[b]);
    }
  }
  const double k = static_cast<double>(group.size());
  return s / (k * k);
}

double Relevance(const FeatureSet &set, std::span<const std::size_t> group) {
  if (set.size() == 0) throw Error(ErrorCode::kInvalidArgument, "relevance needs a nonempty feature set");
  if (group.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i : group) s += set.PmiRowSum(i);
  return s / (static_cast<double>(group.size()) * static_cast<double>(set.size()));
}

double Fitness(const FeatureSet &set, std::span<const std::size_t> group, double alpha) {
  return alpha * Relevance(set, group) - Redundancy(set, group);
}

void GAConfig::Validate() const {
  auto bad = [](const std::string &msg) { return Error(ErrorCode::kInvalidArgument, "GA config: " + msg); };
  if (crossover_rate < 0.0 || crossover_rate > 1.0) throw bad("crossover_rate outside [0,1]");
  if (mutation_rate < 0.0 || mutation_rate > 1.0) throw bad("mutation_rate outside [0,1]");
  if (k < 2) throw bad("k must be >= 2");
  if (population < 2 || population < 2 * elitism) throw bad("population must be >= max(2, 2*elitism)");
  if (n_solutions < 1) throw bad("n_solutions must be >= 1");
  if (tournament < 1) throw bad("tournament must be >= 1");
  if (!std::isfinite(alpha)) throw bad("alpha must be finite");
}

GAConfig GAConfig::FromJson(const Json &j, const GAConfig &defaults) {
  GAConfig c = defaults;
  if (j.is_null()) return c;
  try {
    c.population = j.value("population", c.population);
    c.generations = j.value("generations", c.generations);
    c.crossover_rate = j.value("crossover_rate", c.crossover_rate);
    c.mutation_rate = j.value("mutation_rate", c.mutation_rate);
    c.elitism = j.value("elitism", c.elitism);
    c.k = j.value("k", c.k);
    c.alpha = j.value("alpha", c.alpha);
    c.seed = j.value("seed", c.seed);
    c.n_solutions = j.value("n_solutions", c.n_solutions);
    c.tournament = j.value("tournament", c.tournament);
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("GA config: ") + e.what());
  }
  c.Validate();
  return c;
}

GAConfig GAConfig::FromJson(const Json &j) { return FromJson(j, GAConfig{}); }

OrderedJson GAConfig::ToJson() const {
  return OrderedJson{{"population", population},   {"generations", generations}, {"crossover_rate", crossover_rate},
                     {"mutation_rate", mutation_rate}, {"elitism", elitism},       {"k", k},
                     {"alpha", alpha},             {"seed", seed},               {"n_solutions", n_solutions},
                     {"tournament", tournament}};
}

std::size_t FeatureGroup::IndexOf(std::string_view id) const {
  auto it = std::find(features.begin(), features.end(), id);
  return it == features.end() ? std::string::npos : static_cast<std::size_t>(it - features.begin());
}

OrderedJson FeatureGroup::ToJson() const {
  OrderedJson j;
  j["features"] = features;
  j["redundancy"] = redundancy;
  j["relevance"] = relevance;
  j["fitness"] = fitness;
  j["redundant_neighbors"] = OrderedJson::array();
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto neighbors = i < redundant_neighbors.size() ? redundant_neighbors[i] : std::vector<std::string>{};
    j["redundant_neighbors"].push_back(OrderedJson{{"feature", features[i]}, {"neighbors", neighbors}});
  }
  return j;
}

FeatureGroup FeatureGroup::FromJson(const Json &j) {
  FeatureGroup g;
  g.features = j.at("features").get<std::vector<std::string>>();
  g.redundancy = j.at("redundancy").get<double>();
  g.relevance = j.at("relevance").get<double>();
  g.fitness = j.at("fitness").get<double>();
  g.redundant_neighbors.resize(g.features.size());
  for (const auto &entry : j.at("redundant_neighbors")) {
    const std::size_t i = g.IndexOf(entry.at("feature").get<std::string>());
    if (i != std::string::npos) g.redundant_neighbors[i] = entry.at("neighbors").get<std::vector<std::string>>();
  }
  return g;
}

FeatureGroup MakeGroup(const FeatureSet &set, std::vector<std::size_t> members, double alpha) {
  std::sort(members.begin(), members.end(),
            [&](std::size_t a, std::size_t b) { return set.feature(a).id() < set.feature(b).id(); });
  FeatureGroup g;
  g.redundancy = Redundancy(set, members);
  g.relevance = Relevance(set, members);
  g.fitness = alpha * g.relevance - g.redundancy;
  const std::set<std::size_t> in_group(members.begin(), members.end());
  for (std::size_t m : members) {
    g.features.push_back(set.feature(m).id());
    std::vector<std::size_t> alts;
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (!in_group.count(j) && set.support_count(j) > 0) alts.push_back(j);
    }
    std::sort(alts.begin(), alts.end(), [&](std::size_t a, std::size_t b) {
      const double pa = set.Pmi(m, a);
      const double pb = set.Pmi(m, b);
      if (pa != pb) return pa > pb;
      return set.feature(a).id() < set.feature(b).id();
    });
    std::vector<std::string> names;
    for (std::size_t i = 0; i < alts.size() && i < 2; ++i) names.push_back(set.feature(alts[i]).id());
    g.redundant_neighbors.push_back(std::move(names));
  }
  return g;
}

SelectionResult SelectFeatureGroups(const FeatureSet &set, const GAConfig &config,
                                    std::span<const std::vector<std::size_t>> seeded) {
  config.Validate();
  const std::size_t n = set.size();
  const std::size_t k = config.k;
  if (n < k) {
    throw Error(ErrorCode::kInsufficientFeatures,
                "need at least " + std::to_string(k) + " candidate features, have " + std::to_string(n));
  }
  Rng rng(config.seed);

  // Canonical genome: indices ordered by feature id, so ties break by id.
  std::vector<std::size_t> rank(n);
  {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return set.feature(a).id() < set.feature(b).id(); });
    for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;
  }
  auto canonical = [&](Genome g) {
    std::sort(g.begin(), g.end(), [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
    return g;
  };
  auto key_less = [&](const Genome &a, const Genome &b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != b[i]) return rank[a[i]] < rank[b[i]];
    }
    return false;
  };

  std::map<Genome, double> memo;
  auto fitness = [&](const Genome &g) {
    auto it = memo.find(g);
    if (it != memo.end()) return it->second;
    const double f = Fitness(set, g, config.alpha);
    memo.emplace(g, f);
    return f;
  };
  auto better = [&](const Genome &a, const Genome &b) {
    const double fa = fitness(a);
    const double fb = fitness(b);
    if (fa != fb) return fa > fb;
    return key_less(a, b);
  };
  auto random_genome = [&]() { return canonical(rng.SampleWithoutReplacement(n, k)); };
  auto refill = [&](Genome g) {
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    while (g.size() < k) {
      const std::size_t pick = rng.UniformIndex(n);
      if (std::find(g.begin(), g.end(), pick) == g.end()) g.push_back(pick);
    }
    return canonical(std::move(g));
  };

  // Point mutation: one slot takes a feature not already in the genome.
  auto mutate = [&](Genome g) {
    if (n == k) return g;
    std::size_t pick = 0;
    do {
      pick = rng.UniformIndex(n);
    } while (std::find(g.begin(), g.end(), pick) != g.end());
    g[rng.UniformIndex(k)] = pick;
    return canonical(std::move(g));
  };

  std::vector<Genome> population;
  for (const auto &s : seeded) {
    if (population.size() >= config.population) break;
    if (s.size() != k || std::any_of(s.begin(), s.end(), [&](std::size_t i) { return i >= n; })) {
      throw Error(ErrorCode::kInvalidArgument, "seeded genome must hold k valid feature indices");
    }
    population.push_back(refill(s));
  }
  while (population.size() < config.population) population.push_back(random_genome());

  SelectionResult result;
  for (std::size_t gen = 0;; ++gen) {
    std::sort(population.begin(), population.end(), better);
    result.best_fitness_per_generation.push_back(fitness(population.front()));
    if (gen == config.generations) break;

    std::vector<Genome> next;
    for (const auto &g : population) {
      if (next.size() >= config.elitism) break;
      if (std::find(next.begin(), next.end(), g) == next.end()) next.push_back(g);
    }
    auto tournament = [&]() -> const Genome & {
      const Genome *best = &population[rng.UniformIndex(population.size())];
      for (std::size_t t = 1; t < config.tournament; ++t) {
        const Genome &c = population[rng.UniformIndex(population.size())];
        if (better(c, *best)) best = &c;
      }
      return *best;
    };
    while (next.size() < config.population) {
      const Genome &a = tournament();
      const Genome &b = tournament();
      Genome child = a;
      if (rng.Bernoulli(config.crossover_rate)) {
        for (std::size_t i = 0; i < k; ++i) child[i] = rng.Bernoulli(0.5) ? a[i] : b[i];
        child = refill(std::move(child));
      }
      if (rng.Bernoulli(config.mutation_rate)) child = mutate(std::move(child));
      // Duplicate elimination: an already evaluated child is pushed elsewhere.
      for (std::size_t attempt = 0; attempt < 2 * k && memo.count(child); ++attempt) child = mutate(std::move(child));
      fitness(child);
      next.push_back(std::move(child));
    }
    population = std::move(next);
  }

  std::vector<Genome> ranked;
  ranked.reserve(memo.size());
  for (const auto &[g, f] : memo) ranked.push_back(g);
  std::sort(ranked.begin(), ranked.end(), better);
  for (std::size_t i = 0; i < ranked.size() && i < config.n_solutions; ++i) {
    result.groups.push_back(MakeGroup(set, ranked[i], config.alpha));
  }
  return result;
}

}  // namespace cohort
