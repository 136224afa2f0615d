#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "support/oracles.hpp"
#include "tgraph/sampling.hpp"

using namespace tgraph;

namespace {

using History = std::vector<std::tuple<NodeId, NodeId, Timestamp, std::int64_t>>;

void feed(RecencyBuffer& buf, const History& edges) {
  std::vector<NodeId> s, d;
  std::vector<Timestamp> t;
  std::vector<std::int64_t> r;
  for (const auto& [a, b, ts, row] : edges) {
    s.push_back(a);
    d.push_back(b);
    t.push_back(ts);
    r.push_back(row);
  }
  buf.update(s, d, t, r);
}

std::vector<Timestamp> times(const std::vector<TemporalNeighbor>& l) {
  std::vector<Timestamp> out;
  for (const auto& n : l) out.push_back(n.t);
  return out;
}

}  // namespace

TEST(RecencyBuffer, KeepsTheLastK) {
  RecencyBuffer buf(2);
  feed(buf, {{0, 1, 1, 0}, {0, 2, 2, 1}, {3, 0, 3, 2}});
  const std::vector<NodeId> seeds = {0, 1, 5};
  const auto got = buf.query(seeds, 2);
  EXPECT_EQ(times(got[0]), (std::vector<Timestamp>{3, 2}));
  EXPECT_EQ(got[0][0], (TemporalNeighbor{3, 3, 2}));
  EXPECT_EQ(got[0][1], (TemporalNeighbor{2, 2, 1}));
  EXPECT_EQ(got[1], (std::vector<TemporalNeighbor>{{0, 1, 0}}));
  EXPECT_TRUE(got[2].empty());
}

TEST(RecencyBuffer, WantAboveFillReturnsWhatIsStored) {
  RecencyBuffer buf(8);
  feed(buf, {{0, 1, 1, 0}});
  const std::vector<NodeId> seeds = {0};
  EXPECT_EQ(buf.query(seeds, 8)[0].size(), 1u);
}

TEST(RecencyBuffer, Errors) {
  RecencyBuffer buf(4);
  feed(buf, {{0, 1, 5, 0}});
  try {
    feed(buf, {{0, 1, 4, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::stream_order);
  }
  EXPECT_THROW(feed(buf, {{0, 1, 6, 1}, {0, 1, 5, 2}}), Error);
  EXPECT_NO_THROW(feed(buf, {{0, 1, 5, 1}}));  // equal timestamps are fine
  const std::vector<NodeId> seeds = {0};
  try {
    buf.query(seeds, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::capacity);
  }
  EXPECT_THROW(RecencyBuffer(0), Error);
}

TEST(RecencyBuffer, ClearEmptiesEverything) {
  RecencyBuffer buf(4);
  History h;
  for (int i = 0; i < 100; ++i) h.emplace_back(i % 5, (i + 1) % 5, i, i);
  feed(buf, h);
  buf.clear();
  const std::vector<NodeId> seeds = {0, 1, 2, 3, 4};
  for (const auto& l : buf.query(seeds, 4)) EXPECT_TRUE(l.empty());
  EXPECT_NO_THROW(feed(buf, {{0, 1, 0, 0}}));
}

TEST(RecencyBuffer, MatchesBackwardScanOracle) {
  std::mt19937_64 rng(404);
  for (std::size_t k : {1u, 2u, 16u, 64u}) {
    for (std::size_t num_edges : {100u, 10000u}) {
      RecencyBuffer buf(k);
      History seen;
      std::uniform_int_distribution<NodeId> node(0, 49);
      std::uniform_int_distribution<int> gap(0, 2);
      std::uniform_int_distribution<std::size_t> batch(1, 200);
      Timestamp t = 0;
      while (seen.size() < num_edges) {
        History b;
        const std::size_t n = std::min(batch(rng), num_edges - seen.size());
        for (std::size_t i = 0; i < n; ++i) {
          t += gap(rng);
          b.emplace_back(node(rng), node(rng), t, std::int64_t(seen.size() + i));
        }
        feed(buf, b);
        seen.insert(seen.end(), b.begin(), b.end());
        std::vector<NodeId> seeds;
        for (int i = 0; i < 20; ++i) seeds.push_back(node(rng));
        const auto got = buf.query(seeds, k);
        for (std::size_t i = 0; i < seeds.size(); ++i) {
          ASSERT_EQ(got[i], oracle::backward_scan_recency(seen, seeds[i], k))
              << "k=" << k << " node " << seeds[i];
        }
      }
    }
  }
}

TEST(RecencyBuffer, DuplicateSeedsMatchIndividualQueries) {
  RecencyBuffer buf(3);
  feed(buf, {{0, 1, 1, 0}, {1, 2, 2, 1}, {2, 0, 3, 2}, {0, 3, 4, 3}});
  const std::vector<NodeId> seeds = {0, 2, 0, 0, 2, 7};
  const auto batch = buf.query(seeds, 3);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const std::vector<NodeId> one = {seeds[i]};
    EXPECT_EQ(batch[i], buf.query(one, 3)[0]);
  }
}

TEST(TemporalAdjacency, HoldsBothDirectionsSortedByTime) {
  std::mt19937_64 rng(10);
  const auto r = oracle::random_graph(rng, {.num_edges = 500, .num_nodes = 20});
  const TemporalAdjacency adj{GraphView(r.graph)};
  EXPECT_EQ(adj.num_entries(), 1000u);
  for (NodeId v = 0; v < 20; ++v) {
    const auto l = adj.neighbors(v);
    EXPECT_TRUE(std::is_sorted(l.begin(), l.end(), [](auto& a, auto& b) { return a.t < b.t; }));
  }
}

TEST(UniformQuery, ReturnsAllCandidatesWhenFew) {
  const std::vector<EdgeEvent> edges = {{1, 0, 1, {}}, {3, 2, 0, {}}, {5, 0, 3, {}}, {9, 0, 4, {}}};
  const TemporalAdjacency adj{GraphView(build_graph(edges, TimeGranularity::second))};
  const std::vector<NodeId> seeds = {0};
  const auto got = uniform_query(adj, seeds, 6, 10, 1)[0];
  EXPECT_EQ(got, (std::vector<TemporalNeighbor>{{3, 5, 2}, {2, 3, 1}, {1, 1, 0}}));
}

TEST(UniformQuery, CutIsStrict) {
  const std::vector<EdgeEvent> edges = {{4, 0, 1, {}}, {4, 0, 2, {}}, {7, 0, 3, {}}};
  const TemporalAdjacency adj{GraphView(build_graph(edges, TimeGranularity::second))};
  const std::vector<NodeId> seeds = {0};
  EXPECT_TRUE(uniform_query(adj, seeds, 4, 5, 0)[0].empty());
  EXPECT_TRUE(uniform_query(adj, seeds, 1, 5, 0)[0].empty());
  EXPECT_EQ(uniform_query(adj, seeds, 5, 5, 0)[0].size(), 2u);
  EXPECT_EQ(uniform_query(adj, seeds, 7, 5, 0)[0].size(), 2u);
}

TEST(UniformQuery, SamplesWithoutReplacementBeforeCut) {
  std::mt19937_64 rng(12);
  const auto r = oracle::random_graph(rng, {.num_edges = 2000, .num_nodes = 15, .t_hi = 1000});
  const TemporalAdjacency adj{GraphView(r.graph)};
  std::vector<NodeId> seeds(15);
  std::iota(seeds.begin(), seeds.end(), NodeId{0});
  for (Timestamp t : {0, 10, 500, 1001}) {
    const auto lists = uniform_query(adj, seeds, t, 7, 3);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const auto candidates = adj.neighbors_before(seeds[i], t);
      EXPECT_EQ(lists[i].size(), std::min<std::size_t>(7, candidates.size()));
      std::set<std::int64_t> rows;
      for (const auto& n : lists[i]) {
        EXPECT_LT(n.t, t);
        rows.insert(n.row);
      }
      // a self loop contributes two entries with one row
      EXPECT_GE(rows.size() * 2, lists[i].size());
      EXPECT_TRUE(std::is_sorted(lists[i].begin(), lists[i].end(),
                                 [](auto& a, auto& b) { return a.t > b.t; }));
    }
    EXPECT_EQ(uniform_query(adj, seeds, t, 7, 3), lists);
  }
}

TEST(UniformQuery, EachNeighborEquallyLikely) {
  const std::vector<EdgeEvent> edges = {{1, 0, 1, {}}, {2, 0, 2, {}}, {3, 0, 3, {}}, {4, 0, 4, {}}};
  const TemporalAdjacency adj{GraphView(build_graph(edges, TimeGranularity::second))};
  const std::vector<NodeId> seeds = {0};
  const int draws = 10000;
  std::map<NodeId, int> freq;
  for (int s = 0; s < draws; ++s) ++freq[uniform_query(adj, seeds, 100, 1, s)[0].at(0).node];
  const double sigma = std::sqrt(draws * 0.25 * 0.75);
  ASSERT_EQ(freq.size(), 4u);
  for (const auto& [node, count] : freq) {
    EXPECT_LT(std::abs(count - draws * 0.25), 4 * sigma) << "neighbor " << node;
  }
}

TEST(UniformQuery, DuplicateSeedsMatchIndividualQueries) {
  std::mt19937_64 rng(13);
  const auto r = oracle::random_graph(rng, {.num_edges = 300, .num_nodes = 8});
  const TemporalAdjacency adj{GraphView(r.graph)};
  const std::vector<NodeId> seeds = {3, 3, 1, 3, 1, 7};
  const auto batch = uniform_query(adj, seeds, 600, 4, 21);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const std::vector<NodeId> one = {seeds[i]};
    EXPECT_EQ(batch[i], uniform_query(adj, one, 600, 4, 21)[0]);
  }
}

TEST(MultiHop, SingleHopEqualsUniformQuery) {
  std::mt19937_64 rng(14);
  const auto r = oracle::random_graph(rng, {.num_edges = 300, .num_nodes = 8});
  const TemporalAdjacency adj{GraphView(r.graph)};
  const std::vector<NodeId> seeds = {0, 1, 2};
  const std::vector<std::size_t> fanouts = {3};
  const auto m = multihop_query(adj, seeds, 700, fanouts, 5);
  ASSERT_EQ(m.hops.size(), 1u);
  EXPECT_EQ(m.hops[0], uniform_query(adj, seeds, 700, 3, 5));
  EXPECT_THROW(multihop_query(adj, seeds, 700, {}, 5), Error);
}

TEST(MultiHop, SeedWithoutHistory) {
  const std::vector<EdgeEvent> edges = {{5, 0, 1, {}}, {6, 1, 2, {}}};
  const TemporalAdjacency adj{GraphView(build_graph(edges, TimeGranularity::second))};
  const std::vector<NodeId> seeds = {2};
  const std::vector<std::size_t> fanouts = {2, 2};
  const auto m = multihop_query(adj, seeds, 6, fanouts, 0);
  EXPECT_TRUE(m.hops[0][0].empty());
  EXPECT_TRUE(m.hops[1].empty());
}

TEST(MultiHop, TwoHopPathsMatchEnumeration) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const auto r = oracle::random_graph(rng, {.num_edges = 150, .num_nodes = 20, .t_hi = 200});
    const auto& e = r.graph->edges();
    const TemporalAdjacency adj{GraphView(r.graph)};
    const Timestamp t_query = 150;
    const std::vector<NodeId> seeds = {NodeId(trial % 20)};
    // fanouts larger than any degree, so every valid path is returned
    const std::vector<std::size_t> fanouts = {1000, 1000};
    const auto m = multihop_query(adj, seeds, t_query, fanouts, 9);

    using Path = std::tuple<std::int64_t, std::int64_t, NodeId, NodeId>;
    auto other = [&](std::size_t row, NodeId from) -> std::vector<NodeId> {
      std::vector<NodeId> out;
      if (e.src[row] == from) out.push_back(e.dst[row]);
      if (e.dst[row] == from) out.push_back(e.src[row]);
      return out;
    };
    std::multiset<Path> expected;
    for (std::size_t a = 0; a < e.size(); ++a) {
      if (e.t[a] >= t_query) continue;
      for (NodeId mid : other(a, seeds[0])) {
        for (std::size_t b = 0; b < e.size(); ++b) {
          if (e.t[b] >= e.t[a]) continue;
          for (NodeId end : other(b, mid)) expected.emplace(a, b, mid, end);
        }
      }
    }
    std::multiset<Path> got;
    std::size_t j = 0;
    for (const auto& parent : m.hops[0][0]) {
      ASSERT_LT(parent.t, t_query);
      for (const auto& child : m.hops[1][j++]) {
        ASSERT_LT(child.t, parent.t);
        got.emplace(parent.row, child.row, parent.node, child.node);
      }
    }
    ASSERT_EQ(got, expected) << "trial " << trial;
  }
}
