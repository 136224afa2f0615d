#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "support/oracles.hpp"
#include "tgraph/io.hpp"

using namespace tgraph;
namespace fs = std::filesystem;

namespace {

const fs::path kData = TGRAPH_TEST_DATA_DIR;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("tgraph-io-" + std::to_string(std::random_device{}()) + "-" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

  fs::path write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p;
  }

 private:
  fs::path path_;
};

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::validation;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

GraphPtr distinct_times(std::size_t n) {
  std::vector<EdgeEvent> edges;
  for (std::size_t i = 0; i < n; ++i) edges.push_back({Timestamp(i), 0, 1, {}});
  return build_graph(edges, TimeGranularity::second);
}

}  // namespace

TEST(LoadCsv, AssignsIdsByFirstAppearance) {
  const auto ds = io::load_csv(kData / "tiny" / "dataset.manifest");
  EXPECT_EQ(ds.graph->num_nodes(), 4u);
  EXPECT_EQ(ds.graph->num_edges(), 3u);
  EXPECT_EQ(ds.ids.label(0), "u1");
  EXPECT_EQ(ds.ids.label(1), "i1");
  EXPECT_EQ(ds.ids.label(2), "u2");
  EXPECT_EQ(ds.ids.label(3), "i2");
  EXPECT_EQ(ds.graph->edges().src, (std::vector<NodeId>{0, 2, 0}));
  EXPECT_EQ(ds.graph->edges().dst, (std::vector<NodeId>{1, 1, 3}));
  EXPECT_EQ(ds.graph->edges().t, (std::vector<Timestamp>{5, 7, 7}));
  EXPECT_EQ(ds.graph->edges().feat_dim, 0u);
}

TEST(LoadCsv, ReadsEveryOptionalTable) {
  const auto ds = io::load_csv(kData / "stream" / "dataset.manifest");
  EXPECT_EQ(ds.graph->num_edges(), 40u);
  EXPECT_EQ(ds.graph->edges().feat_dim, 1u);
  EXPECT_EQ(ds.edge_feature_names, (std::vector<std::string>{"amount"}));
  EXPECT_EQ(ds.graph->num_node_events(), 10u);
  EXPECT_EQ(ds.node_feature_names, (std::vector<std::string>{"score"}));
  ASSERT_TRUE(ds.graph->static_features().has_value());
  EXPECT_EQ(ds.graph->static_features()->rows, 8u);
  EXPECT_EQ(ds.graph->static_features()->cols, 2u);
  ASSERT_TRUE(ds.manifest.negatives.has_value());
  EXPECT_EQ(io::read_negatives(*ds.manifest.negatives, ds.ids).size(), 6u);
}

TEST(LoadCsv, ColumnMappingAndIntegralFloats) {
  TempDir dir;
  dir.write("e.csv", "w,from,to,when\n0.5,a,b,36.0\n1.5,b,c,12\n");
  dir.write("m", "edges = e.csv\nsrc_col = from\ndst_col = to\nt_col = when\ngranularity = hour\n");
  const auto ds = io::load_csv(dir.path() / "m");
  EXPECT_EQ(ds.graph->granularity(), TimeGranularity::hour);
  EXPECT_EQ(ds.graph->edges().t, (std::vector<Timestamp>{12, 36}));
  EXPECT_EQ(ds.graph->edges().feat, (std::vector<double>{1.5, 0.5}));
  EXPECT_EQ(ds.edge_feature_names, (std::vector<std::string>{"w"}));
}

TEST(LoadCsv, SchemaErrors) {
  TempDir dir;
  dir.write("e.csv", "src,target,t\na,b,1\n");
  dir.write("m", "edges = e.csv\n");
  const auto msg = message_of([&] { io::load_csv(dir.path() / "m"); });
  EXPECT_NE(msg.find("'dst'"), std::string::npos) << msg;
  EXPECT_EQ(error_of([&] { io::load_csv(dir.path() / "m"); }), Errc::schema);

  EXPECT_EQ(error_of([&] { io::parse_manifest_text("edges = x\ncolour = red\n", "."); }),
            Errc::schema);
  EXPECT_EQ(error_of([&] { io::parse_manifest_text("granularity = day\n", "."); }), Errc::schema);
  EXPECT_EQ(error_of([&] { io::parse_manifest_text("edges = x\ngranularity = fortnight\n", "."); }),
            Errc::schema);
  EXPECT_EQ(error_of([&] { io::load_csv(dir.path() / "missing.manifest"); }), Errc::io);
}

TEST(LoadCsv, RowErrorsCarryLineNumbers) {
  TempDir dir;
  dir.write("m", "edges = e.csv\n");
  dir.write("e.csv", "src,dst,t,w\na,b,1,0.5\na,c,soon,0.5\n");
  auto msg = message_of([&] { io::load_csv(dir.path() / "m"); });
  EXPECT_NE(msg.find("e.csv:3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("soon"), std::string::npos) << msg;

  dir.write("e.csv", "src,dst,t,w\na,b,1,0.5\n\na,c,2,heavy\n");
  msg = message_of([&] { io::load_csv(dir.path() / "m"); });
  EXPECT_NE(msg.find("e.csv:4"), std::string::npos) << msg;

  dir.write("e.csv", "src,dst,t\na,b,1.5\n");
  EXPECT_EQ(error_of([&] { io::load_csv(dir.path() / "m"); }), Errc::parse);
  dir.write("e.csv", "src,dst,t\na,b\n");
  EXPECT_EQ(error_of([&] { io::load_csv(dir.path() / "m"); }), Errc::parse);
}

TEST(LoadCsv, StaticFeaturesMustCoverEveryNode) {
  TempDir dir;
  dir.write("e.csv", "src,dst,t\na,b,1\n");
  dir.write("s.csv", "node,x\na,1\n");
  dir.write("m", "edges = e.csv\nstatic_features = s.csv\n");
  EXPECT_EQ(error_of([&] { io::load_csv(dir.path() / "m"); }), Errc::schema);
  dir.write("s.csv", "node,x\na,1\nb,2\nz,3\n");
  EXPECT_EQ(error_of([&] { io::load_csv(dir.path() / "m"); }), Errc::parse);
}

TEST(LoadCsv, RoundTripIsIdentity) {
  TempDir dir;
  for (const auto* fixture : {"tiny", "growth", "stream"}) {
    const auto a = io::load_csv(kData / fixture / "dataset.manifest");
    const auto out = dir.path() / (std::string(fixture) + ".csv");
    io::write_edges_csv(out, *a.graph, a.ids, io::csv_names(a), 0, a.graph->num_edges());
    auto m = a.manifest;
    m.edges = out;
    m.node_events.reset();
    m.static_features.reset();
    const auto b = io::load_csv(m);
    EXPECT_EQ(b.graph->edges(), a.graph->edges()) << fixture;
    for (std::size_t i = 0; i < a.ids.size(); ++i) {
      if (i < b.ids.size()) {
        EXPECT_EQ(b.ids.label(NodeId(i)), a.ids.label(NodeId(i)));
      }
    }
  }
}

TEST(LoadCsv, RandomRoundTrip) {
  TempDir dir;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(-1e6, 1e6);
  std::ostringstream csv;
  csv << "src,dst,t,a,b\n";
  for (int i = 0; i < 500; ++i) {
    csv << "n" << rng() % 50 << ",m" << rng() % 50 << ',' << rng() % 100000 << ','
        << io::detail::fmt_double(value(rng)) << ',' << io::detail::fmt_double(value(rng) * 1e-9)
        << '\n';
  }
  dir.write("e.csv", csv.str());
  dir.write("m", "edges = e.csv\n");
  const auto a = io::load_csv(dir.path() / "m");
  io::write_edges_csv(dir.path() / "e.csv", *a.graph, a.ids, io::csv_names(a), 0,
                      a.graph->num_edges());
  const auto b = io::load_csv(dir.path() / "m");
  // ids follow first appearance in the file, so compare through labels
  const auto& ea = a.graph->edges();
  const auto& eb = b.graph->edges();
  ASSERT_EQ(ea.size(), eb.size());
  EXPECT_EQ(ea.t, eb.t);
  EXPECT_EQ(ea.feat, eb.feat);
  for (std::size_t i = 0; i < ea.size(); ++i) {
    EXPECT_EQ(a.ids.label(ea.src[i]), b.ids.label(eb.src[i]));
    EXPECT_EQ(a.ids.label(ea.dst[i]), b.ids.label(eb.dst[i]));
  }
}

TEST(ChronologicalSplit, DistinctTimestamps) {
  const auto s = io::chronological_split(distinct_times(100), {});
  EXPECT_EQ(s.train.num_edges(), 70u);
  EXPECT_EQ(s.val.num_edges(), 15u);
  EXPECT_EQ(s.test.num_edges(), 15u);
  EXPECT_EQ(s.val_start, 70);
  EXPECT_EQ(s.test_start, 85);
}

TEST(ChronologicalSplit, SnapsForwardPastATimestampGroup) {
  std::vector<EdgeEvent> edges;
  for (int i = 0; i < 12; ++i) edges.push_back({i, 0, 1, {}});
  for (int i = 0; i < 4; ++i) edges.push_back({6, 0, 1, {}});
  // rows 6..10 share t = 6 and the train target row 8 falls inside them
  const auto g = build_graph(edges, TimeGranularity::second);
  const auto s = io::chronological_split(g, {0.5, 0.25, 0.25});
  EXPECT_EQ(s.train.num_edges(), 11u);
  EXPECT_EQ(s.val.num_edges(), 1u);
  EXPECT_EQ(s.test.num_edges(), 4u);
  EXPECT_EQ(s.val_start, 7);
}

TEST(ChronologicalSplit, DegenerateCases) {
  std::vector<EdgeEvent> same(50, EdgeEvent{3, 0, 1, {}});
  EXPECT_EQ(error_of([&] {
              io::chronological_split(build_graph(same, TimeGranularity::second), {});
            }),
            Errc::degenerate_split);
  EXPECT_EQ(error_of([&] { io::chronological_split(distinct_times(2), {}); }),
            Errc::degenerate_split);
  EXPECT_EQ(error_of([&] { io::chronological_split(distinct_times(10), {0.5, 0.5, 0.5}); }),
            Errc::validation);
  EXPECT_EQ(error_of([&] { io::chronological_split(distinct_times(10), {1.0, 0.0, 0.0}); }),
            Errc::validation);
}

TEST(ChronologicalSplit, PropertiesOnRandomGraphs) {
  std::mt19937_64 rng(8);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto r = oracle::random_graph(
        rng, {.num_edges = 20 + rng() % 500, .t_hi = Timestamp(5 + rng() % 400), .edge_dim = 0});
    const io::SplitRatios ratios{0.6, 0.2, 0.2};
    io::Split s{GraphView(r.graph), GraphView(r.graph), GraphView(r.graph), 0, 0};
    try {
      s = io::chronological_split(r.graph, ratios);
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), Errc::degenerate_split);
      continue;
    }
    ++checked;
    const auto& t = r.graph->edges().t;
    const std::size_t n = t.size();
    const auto& tr = s.train.events();
    const auto& va = s.val.events();
    const auto& te = s.test.events();
    ASSERT_EQ(tr.num_edges() + va.num_edges() + te.num_edges(), n);
    ASSERT_GT(va.num_edges(), 0u);
    ASSERT_GT(te.num_edges(), 0u);
    EXPECT_LT(t[tr.edge_end - 1], t[va.edge_begin]);
    EXPECT_LT(t[va.edge_end - 1], t[te.edge_begin]);
    // each boundary lands at its target or at the end of the group holding it
    auto check = [&](std::size_t boundary, double ratio) {
      const std::size_t target = std::size_t(std::floor(ratio * double(n) + 1e-9));
      EXPECT_GE(boundary, target);
      if (boundary > target) {
        EXPECT_EQ(t[target - 1], t[target]);
        EXPECT_EQ(t[boundary - 1], t[target]);
      }
    };
    check(va.edge_begin, 0.6);
    if (va.edge_begin <= std::size_t(std::floor(0.8 * double(n) + 1e-9))) {
      check(te.edge_begin, 0.8);
    }
  }
  EXPECT_GT(checked, 200);
}

TEST(ParseRatios, Forms) {
  const auto r = io::parse_ratios("0.8, 0.1,0.1");
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->train, 0.8);
  EXPECT_FALSE(io::parse_ratios("0.8,0.2").has_value());
  EXPECT_FALSE(io::parse_ratios("a,b,c").has_value());
}

TEST(ReadNegatives, UnknownLabelIsAnError) {
  TempDir dir;
  io::IdMap ids;
  ids.intern("a");
  ids.intern("b");
  dir.write("n.txt", "a b\n\nb\n");
  const auto neg = io::read_negatives(dir.path() / "n.txt", ids);
  EXPECT_EQ(neg.lists, (std::vector<std::vector<NodeId>>{{0, 1}, {}, {1}}));
  dir.write("n.txt", "a\nq\n");
  const auto msg = message_of([&] { io::read_negatives(dir.path() / "n.txt", ids); });
  EXPECT_NE(msg.find("n.txt:2"), std::string::npos) << msg;
}

TEST(ReadLabels, TableWithValueColumns) {
  TempDir dir;
  io::IdMap ids;
  ids.intern("x");
  dir.write("l.csv", "node,t,p0,p1\nx,1,0.25,0.75\ny,2,1,0\n");
  const auto labels = io::read_labels_csv(dir.path() / "l.csv", ids);
  ASSERT_EQ(labels.size(), 2u);
  EXPECT_EQ(labels[1].node, 1);
  EXPECT_EQ(labels[0].value, (std::vector<double>{0.25, 0.75}));
}
