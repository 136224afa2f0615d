#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tgraph/error.hpp"
#include "tgraph/granularity.hpp"

namespace tgraph {

// Node ids are packed in pairs into one 64-bit key for hashing.
inline constexpr NodeId kMaxNodeId = (NodeId{1} << 31) - 1;

inline std::uint64_t pair_key(NodeId src, NodeId dst) {
  return (static_cast<std::uint64_t>(src) << 32) | static_cast<std::uint64_t>(dst);
}

struct EdgeEvent {
  Timestamp t = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::vector<double> feat;
};

struct NodeEvent {
  Timestamp t = 0;
  NodeId node = 0;
  std::vector<double> feat;
};

/// Edge events in columnar form; `feat` is row-major with `feat_dim` columns.
struct EdgeColumns {
  std::vector<Timestamp> t;
  std::vector<NodeId> src;
  std::vector<NodeId> dst;
  std::vector<double> feat;
  std::size_t feat_dim = 0;

  std::size_t size() const { return t.size(); }
  std::span<const double> feat_row(std::size_t i) const {
    return {feat.data() + i * feat_dim, feat_dim};
  }
  friend bool operator==(const EdgeColumns&, const EdgeColumns&) = default;
};

struct NodeEventColumns {
  std::vector<Timestamp> t;
  std::vector<NodeId> node;
  std::vector<double> feat;
  std::size_t feat_dim = 0;

  std::size_t size() const { return t.size(); }
  std::span<const double> feat_row(std::size_t i) const {
    return {feat.data() + i * feat_dim, feat_dim};
  }
  friend bool operator==(const NodeEventColumns&, const NodeEventColumns&) = default;
};

struct StaticNodeFeatures {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major, rows x cols

  friend bool operator==(const StaticNodeFeatures&, const StaticNodeFeatures&) = default;
};

/// Present on graphs produced by discretization: timestamp k stands for native
/// time `origin + bucket_start(k)` at granularity `source`.
struct SnapshotOrigin {
  Timestamp origin = 0;
  TimeGranularity source = TimeGranularity::second;

  friend bool operator==(const SnapshotOrigin&, const SnapshotOrigin&) = default;
};

struct GraphStats {
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  std::size_t num_node_events = 0;
  std::size_t num_unique_edges = 0;
  std::size_t num_unique_steps = 0;
  std::optional<double> surprise;
};

class TemporalGraph;
using GraphPtr = std::shared_ptr<const TemporalGraph>;

namespace detail {
GraphPtr adopt_columns(const TemporalGraph& source, EdgeColumns edges, NodeEventColumns node_events,
                       TimeGranularity granularity, std::optional<SnapshotOrigin> origin);
}  // namespace detail

/// Immutable, time-sorted event store. Construct through `build_graph` or
/// `TemporalGraph::from_columns`; instances are shared as `GraphPtr`.
class TemporalGraph {
 public:
  /// Validates the columns and stably sorts each event class by timestamp.
  static GraphPtr from_columns(EdgeColumns edges, NodeEventColumns node_events,
                               TimeGranularity granularity,
                               std::optional<StaticNodeFeatures> static_feats = std::nullopt,
                               std::optional<SnapshotOrigin> origin = std::nullopt) {
    const auto scan = validate_columns(edges, node_events);
    if (!scan.edges_sorted) stable_sort_by_time(edges);
    if (!scan.nodes_sorted) stable_sort_by_time(node_events);
    auto graph = std::shared_ptr<TemporalGraph>(new TemporalGraph());
    graph->edges_ = std::move(edges);
    graph->node_events_ = std::move(node_events);
    graph->granularity_ = granularity;
    graph->origin_ = origin;
    graph->build_index();
    graph->node_id_bound_ = static_cast<std::size_t>(scan.max_id + 1);
    graph->num_nodes_ = count_distinct_nodes(graph->edges_, graph->node_events_, scan.max_id);
    if (static_feats) {
      if (static_feats->rows != graph->num_nodes_) {
        throw Error(Errc::dimension_mismatch,
                    "static feature matrix has " + std::to_string(static_feats->rows) +
                        " rows but the graph has " + std::to_string(graph->num_nodes_) +
                        " nodes");
      }
      if (static_feats->data.size() != static_feats->rows * static_feats->cols) {
        throw Error(Errc::dimension_mismatch, "static feature matrix storage size mismatch");
      }
      graph->static_feats_ = std::move(static_feats);
    }
    return graph;
  }

  const EdgeColumns& edges() const { return edges_; }
  const NodeEventColumns& node_events() const { return node_events_; }
  TimeGranularity granularity() const { return granularity_; }
  const std::optional<StaticNodeFeatures>& static_features() const { return static_feats_; }
  const std::optional<SnapshotOrigin>& origin() const { return origin_; }

  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_node_events() const { return node_events_.size(); }
  std::size_t num_events() const { return edges_.size() + node_events_.size(); }
  /// Distinct node ids over edge and node events.
  std::size_t num_nodes() const { return num_nodes_; }
  /// One past the largest node id (0 for an empty graph).
  std::size_t node_id_bound() const { return node_id_bound_; }
  bool empty() const { return num_events() == 0; }

  /// Earliest / latest timestamp over both event classes.
  std::optional<Timestamp> t_min() const {
    if (empty()) return std::nullopt;
    if (edges_.t.empty()) return node_events_.t.front();
    if (node_events_.t.empty()) return edges_.t.front();
    return std::min(edges_.t.front(), node_events_.t.front());
  }
  std::optional<Timestamp> t_max() const {
    if (empty()) return std::nullopt;
    if (edges_.t.empty()) return node_events_.t.back();
    if (node_events_.t.empty()) return edges_.t.back();
    return std::max(edges_.t.back(), node_events_.t.back());
  }

  /// Distinct edge timestamps, ascending, and the first row holding each.
  std::span<const Timestamp> index_times() const { return index_times_; }
  std::span<const std::size_t> index_rows() const { return index_rows_; }

  /// Smallest edge row whose timestamp is >= t, or num_edges().
  std::size_t lower_bound(Timestamp t) const {
    const auto it = std::lower_bound(index_times_.begin(), index_times_.end(), t);
    if (it == index_times_.end()) return edges_.size();
    return index_rows_[static_cast<std::size_t>(it - index_times_.begin())];
  }

  /// Smallest node-event row whose timestamp is >= t.
  std::size_t node_lower_bound(Timestamp t) const {
    return static_cast<std::size_t>(
        std::lower_bound(node_events_.t.begin(), node_events_.t.end(), t) -
        node_events_.t.begin());
  }

 private:
  TemporalGraph() = default;

  friend GraphPtr detail::adopt_columns(const TemporalGraph&, EdgeColumns, NodeEventColumns,
                                        TimeGranularity, std::optional<SnapshotOrigin>);

  struct ColumnScan {
    bool edges_sorted = true;
    bool nodes_sorted = true;
    NodeId max_id = -1;
  };

  static ColumnScan validate_columns(const EdgeColumns& e, const NodeEventColumns& n) {
    if (e.src.size() != e.t.size() || e.dst.size() != e.t.size()) {
      throw Error(Errc::dimension_mismatch, "edge columns have different lengths");
    }
    if (e.feat.size() != e.t.size() * e.feat_dim) {
      throw Error(Errc::dimension_mismatch,
                  "edge feature storage does not match " + std::to_string(e.t.size()) + " x " +
                      std::to_string(e.feat_dim));
    }
    if (n.node.size() != n.t.size()) {
      throw Error(Errc::dimension_mismatch, "node event columns have different lengths");
    }
    if (n.feat.size() != n.t.size() * n.feat_dim) {
      throw Error(Errc::dimension_mismatch, "node event feature storage does not match");
    }
    auto bad_time = [](Timestamp t) {
      return Error(Errc::validation, "negative timestamp " + std::to_string(t));
    };
    auto bad_node = [](NodeId id) {
      return Error(Errc::validation, "node id " + std::to_string(id) + " out of range");
    };
    auto in_range = [](NodeId id) { return id >= 0 && id <= kMaxNodeId; };

    ColumnScan scan;
    for (std::size_t i = 0; i < e.t.size(); ++i) {
      if (e.t[i] < 0) throw bad_time(e.t[i]);
      if (!in_range(e.src[i])) throw bad_node(e.src[i]);
      if (!in_range(e.dst[i])) throw bad_node(e.dst[i]);
      if (i > 0 && e.t[i] < e.t[i - 1]) scan.edges_sorted = false;
      scan.max_id = std::max({scan.max_id, e.src[i], e.dst[i]});
    }
    for (std::size_t i = 0; i < n.t.size(); ++i) {
      if (n.t[i] < 0) throw bad_time(n.t[i]);
      if (!in_range(n.node[i])) throw bad_node(n.node[i]);
      if (i > 0 && n.t[i] < n.t[i - 1]) scan.nodes_sorted = false;
      scan.max_id = std::max(scan.max_id, n.node[i]);
    }
    return scan;
  }

  template <typename Columns>
  static std::vector<std::size_t> sort_permutation(const Columns& c) {
    std::vector<std::size_t> perm(c.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return c.t[a] < c.t[b]; });
    return perm;
  }

  template <typename T>
  static std::vector<T> gather(const std::vector<T>& v, std::span<const std::size_t> perm,
                               std::size_t width = 1) {
    std::vector<T> out(v.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(perm[i] * width), width,
                  out.begin() + static_cast<std::ptrdiff_t>(i * width));
    }
    return out;
  }

  static void stable_sort_by_time(EdgeColumns& c) {
    const auto perm = sort_permutation(c);
    c.t = gather(c.t, perm);
    c.src = gather(c.src, perm);
    c.dst = gather(c.dst, perm);
    if (c.feat_dim > 0) c.feat = gather(c.feat, perm, c.feat_dim);
  }

  static void stable_sort_by_time(NodeEventColumns& c) {
    const auto perm = sort_permutation(c);
    c.t = gather(c.t, perm);
    c.node = gather(c.node, perm);
    if (c.feat_dim > 0) c.feat = gather(c.feat, perm, c.feat_dim);
  }

  static std::size_t count_distinct_nodes(const EdgeColumns& e, const NodeEventColumns& n,
                                         NodeId max_id) {
    const std::size_t mentions = 2 * e.size() + n.size();
    const auto bound = static_cast<std::size_t>(max_id + 1);
    if (bound <= 4 * mentions + 1024) {
      std::vector<char> seen(bound, 0);
      for (std::size_t i = 0; i < e.size(); ++i) {
        seen[static_cast<std::size_t>(e.src[i])] = 1;
        seen[static_cast<std::size_t>(e.dst[i])] = 1;
      }
      for (auto id : n.node) seen[static_cast<std::size_t>(id)] = 1;
      return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 1));
    }
    // sparse ids: sort instead of a bitmap over the whole id range
    std::vector<NodeId> ids;
    ids.reserve(mentions);
    ids.insert(ids.end(), e.src.begin(), e.src.end());
    ids.insert(ids.end(), e.dst.begin(), e.dst.end());
    ids.insert(ids.end(), n.node.begin(), n.node.end());
    std::sort(ids.begin(), ids.end());
    return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
  }

  void build_index() {
    index_times_.clear();
    index_rows_.clear();
    for (std::size_t i = 0; i < edges_.t.size(); ++i) {
      if (i == 0 || edges_.t[i] != edges_.t[i - 1]) {
        index_times_.push_back(edges_.t[i]);
        index_rows_.push_back(i);
      }
    }
  }

  EdgeColumns edges_;
  NodeEventColumns node_events_;
  TimeGranularity granularity_ = TimeGranularity::second;
  std::optional<StaticNodeFeatures> static_feats_;
  std::optional<SnapshotOrigin> origin_;
  std::vector<Timestamp> index_times_;
  std::vector<std::size_t> index_rows_;
  std::size_t num_nodes_ = 0;
  std::size_t node_id_bound_ = 0;
};

/// Builds a graph from row-oriented events. Events with equal timestamps keep
/// their input order.
inline GraphPtr build_graph(std::span<const EdgeEvent> edge_events,
                            std::span<const NodeEvent> node_events,
                            TimeGranularity granularity,
                            std::optional<StaticNodeFeatures> static_feats = std::nullopt) {
  EdgeColumns edges;
  if (!edge_events.empty()) edges.feat_dim = edge_events.front().feat.size();
  edges.t.reserve(edge_events.size());
  edges.src.reserve(edge_events.size());
  edges.dst.reserve(edge_events.size());
  edges.feat.reserve(edge_events.size() * edges.feat_dim);
  for (std::size_t i = 0; i < edge_events.size(); ++i) {
    const auto& e = edge_events[i];
    if (e.feat.size() != edges.feat_dim) {
      throw Error(Errc::dimension_mismatch,
                  "edge event " + std::to_string(i) + " has " + std::to_string(e.feat.size()) +
                      " features, expected " + std::to_string(edges.feat_dim));
    }
    edges.t.push_back(e.t);
    edges.src.push_back(e.src);
    edges.dst.push_back(e.dst);
    edges.feat.insert(edges.feat.end(), e.feat.begin(), e.feat.end());
  }

  NodeEventColumns nodes;
  if (!node_events.empty()) nodes.feat_dim = node_events.front().feat.size();
  for (std::size_t i = 0; i < node_events.size(); ++i) {
    const auto& e = node_events[i];
    if (e.feat.size() != nodes.feat_dim) {
      throw Error(Errc::dimension_mismatch,
                  "node event " + std::to_string(i) + " has " + std::to_string(e.feat.size()) +
                      " features, expected " + std::to_string(nodes.feat_dim));
    }
    nodes.t.push_back(e.t);
    nodes.node.push_back(e.node);
    nodes.feat.insert(nodes.feat.end(), e.feat.begin(), e.feat.end());
  }
  return TemporalGraph::from_columns(std::move(edges), std::move(nodes), granularity,
                                     std::move(static_feats));
}

inline GraphPtr build_graph(std::span<const EdgeEvent> edge_events, TimeGranularity granularity) {
  return build_graph(edge_events, {}, granularity);
}

inline std::size_t lower_bound(const TemporalGraph& graph, Timestamp t) {
  return graph.lower_bound(t);
}

/// Counts for one graph. With `split_time`, also reports surprise: the share
/// of distinct (src, dst) pairs at t >= split_time never seen before it.
inline GraphStats graph_stats(const TemporalGraph& graph,
                              std::optional<Timestamp> split_time = std::nullopt) {
  const auto& e = graph.edges();
  GraphStats stats;
  stats.num_nodes = graph.num_nodes();
  stats.num_edges = graph.num_edges();
  stats.num_node_events = graph.num_node_events();

  std::unordered_set<std::uint64_t> pairs;
  pairs.reserve(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) pairs.insert(pair_key(e.src[i], e.dst[i]));
  stats.num_unique_edges = pairs.size();

  std::vector<Timestamp> steps;
  steps.reserve(graph.num_events());
  std::set_union(e.t.begin(), e.t.end(), graph.node_events().t.begin(),
                 graph.node_events().t.end(), std::back_inserter(steps));
  stats.num_unique_steps = static_cast<std::size_t>(
      std::unique(steps.begin(), steps.end()) - steps.begin());

  if (split_time) {
    if (e.size() == 0 || *split_time < e.t.front() || *split_time > e.t.back()) {
      throw Error(Errc::out_of_range,
                  "split time " + std::to_string(*split_time) + " outside the edge time range");
    }
    const std::size_t boundary = graph.lower_bound(*split_time);
    std::unordered_set<std::uint64_t> before;
    before.reserve(boundary);
    for (std::size_t i = 0; i < boundary; ++i) before.insert(pair_key(e.src[i], e.dst[i]));
    std::unordered_set<std::uint64_t> after;
    std::size_t unseen = 0;
    for (std::size_t i = boundary; i < e.size(); ++i) {
      const auto key = pair_key(e.src[i], e.dst[i]);
      if (after.insert(key).second && !before.contains(key)) ++unseen;
    }
    stats.surprise = static_cast<double>(unseen) / static_cast<double>(after.size());
  }
  return stats;
}

namespace detail {

// Wraps columns derived from `source` that are already time-sorted and use
// exactly the node set of `source`.
inline GraphPtr adopt_columns(const TemporalGraph& source, EdgeColumns edges,
                              NodeEventColumns node_events, TimeGranularity granularity,
                              std::optional<SnapshotOrigin> origin) {
  auto graph = std::shared_ptr<TemporalGraph>(new TemporalGraph());
  graph->edges_ = std::move(edges);
  graph->node_events_ = std::move(node_events);
  graph->granularity_ = granularity;
  graph->origin_ = origin;
  graph->static_feats_ = source.static_feats_;
  graph->build_index();
  graph->num_nodes_ = source.num_nodes_;
  graph->node_id_bound_ = source.node_id_bound_;
  return graph;
}

}  // namespace detail

}  // namespace tgraph
