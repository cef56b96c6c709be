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
#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "cohort/analytics.hpp"
#include "cohort/community.hpp"
#include "cohort/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace cohort {
namespace {

using testing::TangCorpus;

class Analytics : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { corpus_ = new Corpus(TangCorpus()); }
  static void TearDownTestSuite() { delete corpus_; }
  static std::vector<EventRecord> Events(std::vector<std::string> figures) {
    return DeriveEvents(corpus_->graph, corpus_->schema, figures).records;
  }
  static Corpus *corpus_;
};
Corpus *Analytics::corpus_ = nullptr;

TEST_F(Analytics, FigureEventsMatchFixture) {
  const auto events = Events({"F1"});
  std::vector<std::string> ids;
  for (const auto &e : events) ids.push_back(e.event);
  EXPECT_EQ(ids, (std::vector<std::string>{"E01", "E02", "G01", "G02", "X01"}));
  const auto &e02 = events[1];
  EXPECT_EQ(e02.category, EventCategory::kPolitics);
  EXPECT_EQ(e02.year, 737);
  EXPECT_EQ(e02.location, std::optional<std::string>("Jingzhou"));
  EXPECT_TRUE(e02.co_figures.empty());
  EXPECT_EQ(events[2].category, EventCategory::kSociality);
  EXPECT_EQ(events[2].co_figures, (std::vector<std::string>{"F3", "F6"}));
  EXPECT_EQ(events[4].category, EventCategory::kAcademic);
  EXPECT_EQ(events[4].year, 702);
  EXPECT_FALSE(events[4].location.has_value());
}

TEST_F(Analytics, SparseFigures) {
  EXPECT_TRUE(Events({}).empty());
  ASSERT_EQ(Events({"F8"}).size(), 1u);
  EXPECT_EQ(Events({"F8"})[0].event, "G08");
  const auto derived = DeriveEvents(corpus_->graph, corpus_->schema, std::vector<std::string>{"F12"});
  EXPECT_EQ(derived.records.size(), 1u);
  EXPECT_EQ(derived.unmapped, 0u);
}

TEST_F(Analytics, HistoryFiltersAndOrders) {
  const auto events = Events({"F1", "F2"});
  const auto h = FigureHistory("F1", events);
  ASSERT_EQ(h.size(), 5u);
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(*h[i - 1].year, *h[i].year);
  const auto politics = FigureHistory("F1", events, EventCategory::kPolitics);
  ASSERT_EQ(politics.size(), 2u);
  EXPECT_EQ(politics[0].event, "E01");
}

TEST(Ranking, CountOracle) {
  const auto r = RankCounts({9, 4, 1, 1, 0});
  EXPECT_EQ(r.total, 15u);
  using P = std::pair<EventCategory, std::size_t>;
  EXPECT_EQ(r.top3, (std::vector<P>{{EventCategory::kPolitics, 9}, {EventCategory::kAcademic, 4},
                                    {EventCategory::kReligion, 1}}));
  EXPECT_EQ(RankCounts({0, 0, 0, 0, 0}).total, 0u);
  EXPECT_TRUE(RankCounts({0, 0, 0, 0, 0}).top3.empty());
  EXPECT_EQ(RankCounts({0, 2, 0, 5, 1}).top3,
            (std::vector<P>{{EventCategory::kSociality, 5}, {EventCategory::kAcademic, 2},
                            {EventCategory::kMilitary, 1}}));
  EXPECT_EQ(RankCounts({0, 0, 3, 0, 0}).top3, (std::vector<P>{{EventCategory::kReligion, 3}}));
}

TEST(Ranking, RandomCountsAgainstSort) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<std::size_t, 5> counts{};
    for (auto &c : counts) c = gen() % 4;
    std::vector<std::pair<std::string, std::size_t>> named;
    std::size_t total = 0;
    for (EventCategory c : kEventCategories) {
      const auto n = counts[static_cast<std::size_t>(c)];
      total += n;
      if (n) named.emplace_back(std::string(CategoryName(c)), n);
    }
    std::sort(named.begin(), named.end(), [](const auto &a, const auto &b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    named.resize(std::min<std::size_t>(named.size(), 3));
    const auto r = RankCounts(counts);
    EXPECT_EQ(r.total, total);
    ASSERT_EQ(r.top3.size(), named.size());
    for (std::size_t i = 0; i < named.size(); ++i) {
      EXPECT_EQ(CategoryName(r.top3[i].first), named[i].first);
      EXPECT_EQ(r.top3[i].second, named[i].second);
    }
  }
}

TEST(Ranking, CategoryNames) {
  for (EventCategory c : kEventCategories) EXPECT_EQ(CategoryFromName(CategoryName(c)), c);
  EXPECT_FALSE(CategoryFromName("trade").has_value());
}

UndirectedGraph Simple(std::size_t n, const oracle::EdgeList &edges) {
  std::vector<WeightedEdge> w;
  for (const auto &[u, v] : edges) w.push_back({u, v, 1.0});
  return UndirectedGraph::Simple(n, w);
}

TEST(GirvanNewman, MatchesOracleOnRandomGraphs) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + gen() % 11;
    const double p = 0.15 + 0.35 * static_cast<double>(gen() % 100) / 100.0;
    oracle::EdgeList edges;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (static_cast<double>(gen() % 1000) / 1000.0 < p) edges.emplace_back(u, v);
      }
    }
    std::shuffle(edges.begin(), edges.end(), gen);
    const auto got = GirvanNewman(Simple(n, edges));
    EXPECT_EQ(got.community, oracle::GirvanNewman(n, edges)) << "trial " << trial;
    EXPECT_NEAR(got.modularity, oracle::Modularity(n, edges, got.community), 1e-12);
  }
}

TEST(GirvanNewman, BetweennessAndComponentsMatchOracle) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + gen() % 10;
    oracle::EdgeList edges;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (gen() % 3 == 0) edges.emplace_back(u, v);
      }
    }
    const auto g = Simple(n, edges);
    oracle::EdgeList simple;
    for (const auto &e : g.edges) simple.emplace_back(e.u, e.v);
    std::vector<bool> alive(simple.size());
    for (std::size_t e = 0; e < alive.size(); ++e) alive[e] = gen() % 4 != 0;
    const auto got = EdgeBetweenness(g, alive);
    const auto want = oracle::Betweenness(n, simple, alive);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t e = 0; e < got.size(); ++e) EXPECT_NEAR(got[e], want[e], 1e-9);
    EXPECT_EQ(ConnectedComponents(g, alive), oracle::Components(n, simple, alive));
  }
}

oracle::EdgeList TwoCliquesAndBridge() {
  oracle::EdgeList edges;
  for (std::size_t base : {0u, 4u}) {
    for (std::size_t u = 0; u < 4; ++u) {
      for (std::size_t v = u + 1; v < 4; ++v) edges.emplace_back(base + u, base + v);
    }
  }
  edges.emplace_back(3, 4);
  return edges;
}

TEST(GirvanNewman, BridgeSplitsCliques) {
  const auto edges = TwoCliquesAndBridge();
  const auto g = Simple(8, edges);
  const auto b = EdgeBetweenness(g, std::vector<bool>(g.edges.size(), true));
  const auto top = std::max_element(b.begin(), b.end()) - b.begin();
  EXPECT_EQ(g.edges[top].u, 3u);
  EXPECT_EQ(g.edges[top].v, 4u);
  EXPECT_DOUBLE_EQ(b[top], 16.0);
  const auto p = GirvanNewman(g);
  EXPECT_EQ(p.count, 2u);
  EXPECT_EQ(p.community, (std::vector<std::size_t>{0, 0, 0, 0, 1, 1, 1, 1}));
  EXPECT_EQ(GirvanNewman(g, 2).community, p.community);
  EXPECT_EQ(GirvanNewman(g, 1).count, 1u);
}

TEST(GirvanNewman, DegenerateGraphs) {
  const auto edgeless = GirvanNewman(Simple(4, {}));
  EXPECT_EQ(edgeless.community, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(edgeless.count, 4u);
  EXPECT_TRUE(GirvanNewman(Simple(0, {})).community.empty());
  try {
    GirvanNewman(Simple(kMaxCommunityNodes + 1, {}));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kGraphTooLarge);
  }
}

TEST(GirvanNewman, StronglyConnected) {
  const std::vector<std::pair<std::size_t, std::size_t>> arcs{{0, 1}, {1, 2}, {2, 0}, {2, 3}, {4, 3}};
  const auto p = StronglyConnected(5, arcs);
  EXPECT_EQ(p.community, (std::vector<std::size_t>{0, 0, 0, 1, 2}));
  EXPECT_EQ(p.count, 3u);
}

// Figures sharing each event, read straight off the graph.
std::map<std::string, std::set<std::string>> Participants(const KnowledgeGraph &g) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto &e : g.edges()) {
    const Node &s = g.node(e.source);
    const Node &t = g.node(e.target);
    if (g.TypeOf(s).kind == NodeKind::kFigure && g.TypeOf(t).kind == NodeKind::kEvent) out[t.id].insert(s.id);
    if (g.TypeOf(t).kind == NodeKind::kFigure && g.TypeOf(s).kind == NodeKind::kEvent) out[s.id].insert(t.id);
  }
  return out;
}

TEST_F(Analytics, MatrixMatchesGraphAndOracle) {
  const std::vector<std::string> figures{"F1", "F2", "F3", "F4", "F5", "F6", "F7", "F10"};
  const auto m = BuildRelationshipMatrix(figures, Events(figures));
  ASSERT_EQ(m.figures.size(), figures.size());
  EXPECT_EQ(std::set<std::string>(m.figures.begin(), m.figures.end()),
            std::set<std::string>(figures.begin(), figures.end()));

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < figures.size(); ++i) index[figures[i]] = i;
  std::vector<std::vector<std::size_t>> shared(figures.size(), std::vector<std::size_t>(figures.size(), 0));
  oracle::EdgeList edges;
  for (const auto &[event, people] : Participants(corpus_->graph)) {
    for (const auto &a : people) {
      for (const auto &b : people) {
        if (a < b && index.count(a) && index.count(b)) {
          ++shared[index[a]][index[b]];
          ++shared[index[b]][index[a]];
          edges.emplace_back(index[a], index[b]);
        }
      }
    }
  }
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < m.figures.size(); ++i) pos[m.figures[i]] = i;
  for (std::size_t i = 0; i < figures.size(); ++i) {
    for (std::size_t j = 0; j < figures.size(); ++j) {
      if (i == j) continue;
      EXPECT_EQ(m.cells[pos[figures[i]]][pos[figures[j]]], shared[i][j]) << figures[i] << "," << figures[j];
    }
  }
  EXPECT_EQ(m.cells[pos["F1"]][pos["F3"]], 2u);

  // Same grouping as the oracle, with each community contiguous.
  const auto want = oracle::GirvanNewman(figures.size(), edges);
  for (std::size_t i = 0; i < figures.size(); ++i) {
    for (std::size_t j = 0; j < figures.size(); ++j) {
      EXPECT_EQ(want[i] == want[j], m.community[pos[figures[i]]] == m.community[pos[figures[j]]]);
    }
  }
  std::set<std::size_t> closed;
  for (std::size_t i = 1; i < m.community.size(); ++i) {
    if (m.community[i] != m.community[i - 1]) {
      closed.insert(m.community[i - 1]);
      EXPECT_FALSE(closed.count(m.community[i])) << "community split at " << i;
    }
  }
  EXPECT_EQ(m.community[pos["F3"]], m.community[pos["F1"]]);
  EXPECT_EQ(m.community[pos["F6"]], m.community[pos["F1"]]);
}

TEST_F(Analytics, MatrixWithoutSharedEvents) {
  const std::vector<std::string> figures{"F9", "F12", "F7"};
  const auto m = BuildRelationshipMatrix(figures, Events(figures));
  EXPECT_EQ(m.figures, figures);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) {
        EXPECT_EQ(m.cells[i][j], 0u);
      }
    }
  }
  EXPECT_EQ(m.communities, 3u);
}

TEST_F(Analytics, MapCountsDistinctLocatedEvents) {
  std::vector<std::string> all;
  for (const auto &f : corpus_->figures) all.push_back(f);
  const auto events = Events(all);
  const auto bins = EventMap(corpus_->graph, events);
  std::vector<std::pair<std::string, std::size_t>> got;
  for (const auto &b : bins) got.emplace_back(b.location, b.count);
  EXPECT_EQ(got, (std::vector<std::pair<std::string, std::size_t>>{
                     {"Changan", 4}, {"Jingzhou", 4}, {"Hongzhou", 3}, {"Luoyang", 3}}));
  for (const auto &b : bins) {
    EXPECT_TRUE(b.lat.has_value());
    EXPECT_TRUE(b.lon.has_value());
  }
  std::set<std::string> located;
  for (const auto &e : events) {
    if (e.location) located.insert(e.event);
  }
  std::size_t sum = 0;
  for (const auto &b : bins) sum += b.count;
  EXPECT_EQ(sum, located.size());
}

TEST_F(Analytics, MapSinglePlace) {
  const auto bins = EventMap(corpus_->graph, Events({"F3"}));
  ASSERT_EQ(bins.size(), 1u);
  EXPECT_EQ(bins[0].location, "Jingzhou");
  EXPECT_EQ(bins[0].count, 2u);
}

TEST(Timeline, PlantedYearsSumTo96) {
  const KnowledgeGraph g = testing::TimelineGraph();
  const SchemaMapping schema = testing::TangSchema();
  std::vector<std::string> figures{"P1", "P2", "P3", "P4", "P5", "P6"};
  const auto events = DeriveEvents(g, schema, figures).records;
  const auto bins = EventTimeline(events);
  std::size_t planted = 0;
  std::size_t total = 0;
  for (const auto &b : bins) {
    total += b.count;
    if (b.year >= 710 && b.year <= 712) planted += b.count;
    EXPECT_LE(b.samples.size(), kTimelineSamples);
    EXPECT_EQ(b.samples.size(), std::min(b.count, kTimelineSamples));
  }
  EXPECT_EQ(planted, 96u);
  std::set<std::string> dated;
  for (const auto &e : events) {
    if (e.year) dated.insert(e.event);
  }
  EXPECT_EQ(total, dated.size());
  EXPECT_EQ(total, 103u);
  EXPECT_TRUE(EventMap(g, events).empty());
  for (std::size_t i = 1; i < bins.size(); ++i) EXPECT_LT(bins[i - 1].year, bins[i].year);
}

TEST_F(Analytics, DetailsMatchGolden) {
  std::vector<Feature> features;
  for (const char *t : {"Affiliation(O1)", "[Celebrity(F1) & TimeRange(737,740)]", "Location(Hongzhou)",
                        "Affiliation(O2)", "Location(Changan)"}) {
    features.push_back(ParseFeature(t));
  }
  const auto got = FigureDetails(corpus_->graph, corpus_->schema, corpus_->store, "F1", features);
  EXPECT_EQ(Json::parse(got.dump()), testing::ReadJsonFixture("golden/f1_details.json"));
  double last = 2.0;
  for (const auto &f : got["features"]) {
    EXPECT_LE(f["frequency"].get<double>(), last);
    last = f["frequency"].get<double>();
  }
}

TEST_F(Analytics, DetailsWithoutSources) {
  const auto got = FigureDetails(corpus_->graph, corpus_->schema, corpus_->store, "F3", {});
  EXPECT_FALSE(got.contains("sources"));
  EXPECT_TRUE(got["features"].empty());
  EXPECT_TRUE(FigureDetails(corpus_->graph, corpus_->schema, corpus_->store, "F12", {}).contains("sources"));
  try {
    FigureDetails(corpus_->graph, corpus_->schema, corpus_->store, "F99", {});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownFigure);
  }
}

}  // namespace
}  // namespace cohort
