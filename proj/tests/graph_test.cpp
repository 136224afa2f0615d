#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support/oracles.hpp"
#include "tgraph/graph.hpp"

using namespace tgraph;

namespace {

std::vector<EdgeEvent> tagged_edges(std::initializer_list<std::pair<Timestamp, double>> items) {
  std::vector<EdgeEvent> out;
  for (auto [t, tag] : items) out.push_back({t, 0, 1, {tag}});
  return out;
}

}  // namespace

TEST(BuildGraph, SortsStablyByTime) {
  const std::vector<EdgeEvent> edges = {{3, 0, 1, {}}, {1, 0, 2, {}}, {3, 1, 2, {}}};
  const auto g = build_graph(edges, TimeGranularity::second);
  EXPECT_EQ(g->edges().t, (std::vector<Timestamp>{1, 3, 3}));
  EXPECT_EQ(g->edges().src, (std::vector<NodeId>{0, 0, 1}));
  EXPECT_EQ(g->edges().dst, (std::vector<NodeId>{2, 1, 2}));
  EXPECT_EQ(g->num_nodes(), 3u);
}

TEST(BuildGraph, KeepsInputOrderAmongEqualTimestamps) {
  const auto edges = tagged_edges({{5, 0}, {2, 1}, {5, 2}, {2, 3}, {5, 4}});
  const auto g = build_graph(edges, TimeGranularity::second);
  EXPECT_EQ(g->edges().feat, (std::vector<double>{1, 3, 0, 2, 4}));
}

TEST(BuildGraph, MatchesReferenceSortOnRandomEvents) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Timestamp> time(0, 500);
  std::vector<EdgeEvent> edges;
  for (int i = 0; i < 10000; ++i) edges.push_back({time(rng), 0, 0, {double(i)}});
  std::vector<std::pair<Timestamp, int>> keys;
  for (int i = 0; i < 10000; ++i) keys.emplace_back(edges[i].t, i);
  std::sort(keys.begin(), keys.end());

  const auto g = build_graph(edges, TimeGranularity::second);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    ASSERT_EQ(g->edges().t[i], keys[i].first);
    ASSERT_EQ(g->edges().feat[i], double(keys[i].second));
  }
}

TEST(BuildGraph, EmptyGraphIsLegal) {
  const auto g = build_graph(std::span<const EdgeEvent>{}, TimeGranularity::second);
  EXPECT_TRUE(g->empty());
  EXPECT_EQ(g->num_nodes(), 0u);
  EXPECT_FALSE(g->t_min().has_value());
  EXPECT_EQ(g->lower_bound(3), 0u);
}

TEST(BuildGraph, RejectsBadInput) {
  const std::vector<EdgeEvent> ragged = {{1, 0, 1, {1.0}}, {2, 0, 1, {1.0, 2.0}}};
  try {
    build_graph(ragged, TimeGranularity::second);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dimension_mismatch);
  }
  const std::vector<EdgeEvent> negative = {{-1, 0, 1, {}}};
  try {
    build_graph(negative, TimeGranularity::second);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::validation);
  }
}

TEST(BuildGraph, StaticFeatureRowsMustMatchNodeCount) {
  const std::vector<EdgeEvent> edges = {{1, 0, 1, {}}};
  StaticNodeFeatures ok{2, 1, {0.5, 1.5}};
  EXPECT_NO_THROW(build_graph(edges, {}, TimeGranularity::second, ok));
  StaticNodeFeatures bad{3, 1, {0.5, 1.5, 2.5}};
  EXPECT_THROW(build_graph(edges, {}, TimeGranularity::second, bad), Error);
}

TEST(BuildGraph, RebuildFromColumnsIsIdentical) {
  std::mt19937_64 rng(3);
  const auto r = oracle::random_graph(rng, {.num_edges = 500, .num_node_events = 200});
  const auto again = TemporalGraph::from_columns(r.graph->edges(), r.graph->node_events(),
                                                 r.graph->granularity());
  EXPECT_EQ(again->edges(), r.graph->edges());
  EXPECT_EQ(again->node_events(), r.graph->node_events());
}

TEST(BuildGraph, IndexPointsAtFirstRowOfEachTimestamp) {
  std::mt19937_64 rng(5);
  const auto r = oracle::random_graph(rng, {.num_edges = 2000, .t_hi = 300});
  const auto& t = r.graph->edges().t;
  ASSERT_TRUE(std::is_sorted(t.begin(), t.end()));
  const auto times = r.graph->index_times();
  const auto rows = r.graph->index_rows();
  ASSERT_EQ(times.size(), rows.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_EQ(t[rows[i]], times[i]);
    if (rows[i] > 0) {
      EXPECT_LT(t[rows[i] - 1], times[i]);
    }
  }
}

TEST(LowerBound, Examples) {
  const std::vector<EdgeEvent> edges = {{1, 0, 1, {}}, {3, 0, 1, {}}, {3, 0, 1, {}}, {7, 0, 1, {}}};
  const auto g = build_graph(edges, TimeGranularity::second);
  EXPECT_EQ(lower_bound(*g, 3), 1u);
  EXPECT_EQ(lower_bound(*g, 0), 0u);
  EXPECT_EQ(lower_bound(*g, 8), 4u);
  EXPECT_EQ(lower_bound(*g, 4), 3u);
}

TEST(LowerBound, MatchesLinearScan) {
  std::mt19937_64 rng(9);
  for (std::size_t n : {1u, 10u, 1000u, 100000u}) {
    const auto r = oracle::random_graph(
        rng, {.num_edges = n, .t_lo = 10, .t_hi = Timestamp(10 + n), .edge_dim = 0});
    const auto& t = r.graph->edges().t;
    std::vector<Timestamp> queries = {t.front() - 1, t.back() + 1};
    for (std::size_t i = 0; i < t.size(); i += std::max<std::size_t>(1, t.size() / 2000)) {
      queries.push_back(t[i]);
    }
    for (auto q : queries) ASSERT_EQ(lower_bound(*r.graph, q), oracle::linear_lower_bound(t, q));
  }
}

TEST(GraphStats, Counts) {
  const std::vector<EdgeEvent> edges = {
      {1, 0, 1, {}}, {2, 0, 1, {}}, {2, 1, 2, {}}, {4, 0, 1, {}}, {5, 2, 3, {}}};
  const std::vector<NodeEvent> nodes = {{3, 7, {}}, {4, 0, {}}};
  const auto g = build_graph(edges, nodes, TimeGranularity::second);
  const auto s = graph_stats(*g);
  EXPECT_EQ(s.num_nodes, 5u);
  EXPECT_EQ(s.num_edges, 5u);
  EXPECT_EQ(s.num_node_events, 2u);
  EXPECT_EQ(s.num_unique_edges, 3u);
  EXPECT_EQ(s.num_unique_steps, 5u);  // {1,2,3,4,5}
  EXPECT_FALSE(s.surprise.has_value());
}

TEST(GraphStats, SurpriseExtremes) {
  const std::vector<EdgeEvent> seen = {{1, 0, 1, {}}, {2, 1, 2, {}}, {5, 0, 1, {}}, {6, 1, 2, {}}};
  EXPECT_DOUBLE_EQ(*graph_stats(*build_graph(seen, TimeGranularity::second), 5).surprise, 0.0);

  const std::vector<EdgeEvent> fresh = {{1, 0, 1, {}}, {2, 1, 2, {}}, {5, 2, 3, {}}, {6, 3, 0, {}}};
  EXPECT_DOUBLE_EQ(*graph_stats(*build_graph(fresh, TimeGranularity::second), 5).surprise, 1.0);
}

TEST(GraphStats, SurpriseUsesUniquePairs) {
  // after the split: (0,1) seen, (2,3) new and repeated three times
  const std::vector<EdgeEvent> edges = {
      {1, 0, 1, {}}, {5, 0, 1, {}}, {5, 2, 3, {}}, {6, 2, 3, {}}, {7, 2, 3, {}}};
  EXPECT_DOUBLE_EQ(*graph_stats(*build_graph(edges, TimeGranularity::second), 5).surprise, 0.5);
}

TEST(GraphStats, SplitOutsideRangeIsAnError) {
  const std::vector<EdgeEvent> edges = {{10, 0, 1, {}}, {20, 0, 1, {}}};
  const auto g = build_graph(edges, TimeGranularity::second);
  for (Timestamp bad : {9, 21}) {
    try {
      graph_stats(*g, bad);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::out_of_range);
    }
  }
}

TEST(GraphStats, PropertyBoundsOnRandomGraphs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = oracle::random_graph(rng, {.num_edges = 300, .num_node_events = 50});
    const auto s = graph_stats(*r.graph);
    EXPECT_LE(s.num_unique_edges, s.num_edges);
    EXPECT_LE(s.num_unique_steps, s.num_edges + s.num_node_events);
  }
}
