#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tgraph/error.hpp"
#include "tgraph/granularity.hpp"
#include "tgraph/graph.hpp"

namespace tgraph {

/// Half-open time interval [start, end) in native ticks.
struct Interval {
  Timestamp start = 0;
  Timestamp end = 0;

  bool contains(Timestamp t) const { return start <= t && t < end; }
  bool empty() const { return start >= end; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Contiguous rows of both event classes plus the time range they came from.
/// Used both for views and for loader batches; never owns event data.
struct EventSlice {
  GraphPtr graph;
  Interval interval;
  std::size_t edge_begin = 0;
  std::size_t edge_end = 0;
  std::size_t node_begin = 0;
  std::size_t node_end = 0;

  std::size_t num_edges() const { return edge_end - edge_begin; }
  std::size_t num_node_events() const { return node_end - node_begin; }
  std::size_t num_events() const { return num_edges() + num_node_events(); }

  std::span<const Timestamp> edge_time() const { return edge_span(graph->edges().t); }
  std::span<const NodeId> src() const { return edge_span(graph->edges().src); }
  std::span<const NodeId> dst() const { return edge_span(graph->edges().dst); }
  std::span<const double> edge_feat() const {
    const auto d = graph->edges().feat_dim;
    return std::span<const double>(graph->edges().feat).subspan(edge_begin * d, num_edges() * d);
  }
  std::span<const Timestamp> node_time() const {
    return std::span<const Timestamp>(graph->node_events().t).subspan(node_begin, num_node_events());
  }
  std::span<const NodeId> node_ids() const {
    return std::span<const NodeId>(graph->node_events().node).subspan(node_begin, num_node_events());
  }

  friend bool operator==(const EventSlice& a, const EventSlice& b) {
    return a.graph == b.graph && a.interval == b.interval && a.edge_begin == b.edge_begin &&
           a.edge_end == b.edge_end && a.node_begin == b.node_begin && a.node_end == b.node_end;
  }

 private:
  template <typename T>
  std::span<const T> edge_span(const std::vector<T>& column) const {
    return std::span<const T>(column).subspan(edge_begin, num_edges());
  }
};

/// Lightweight handle onto a time range of shared storage.
class GraphView {
 public:
  /// View over the whole graph: [t_min, t_max + 1), or [0, 0) when empty.
  explicit GraphView(GraphPtr graph)
      : GraphView(graph, full_interval(*graph), graph->granularity()) {}

  GraphView(GraphPtr graph, Interval interval, TimeGranularity iter_granularity)
      : graph_(std::move(graph)), interval_(interval), iter_granularity_(iter_granularity) {
    if (interval_.start > interval_.end) {
      throw Error(Errc::out_of_range, "view interval start after end");
    }
    slice_.graph = graph_;
    slice_.interval = interval_;
    slice_.edge_begin = graph_->lower_bound(interval_.start);
    slice_.edge_end = std::max(slice_.edge_begin, graph_->lower_bound(interval_.end));
    slice_.node_begin = graph_->node_lower_bound(interval_.start);
    slice_.node_end = std::max(slice_.node_begin, graph_->node_lower_bound(interval_.end));
  }

  const GraphPtr& graph() const { return graph_; }
  const TemporalGraph& storage() const { return *graph_; }
  Interval interval() const { return interval_; }
  TimeGranularity iter_granularity() const { return iter_granularity_; }
  const EventSlice& events() const { return slice_; }
  std::size_t num_edges() const { return slice_.num_edges(); }
  std::size_t num_events() const { return slice_.num_events(); }

  GraphView with_iter_granularity(TimeGranularity g) const { return {graph_, interval_, g}; }

  static Interval full_interval(const TemporalGraph& graph) {
    if (graph.empty()) return {0, 0};
    return {*graph.t_min(), *graph.t_max() + 1};
  }

 private:
  GraphPtr graph_;
  Interval interval_;
  TimeGranularity iter_granularity_;
  EventSlice slice_;
};

/// Sub-view of [t_start, t_end); the range must lie inside the parent's.
inline GraphView slice_view(const GraphView& view, Timestamp t_start, Timestamp t_end) {
  const auto parent = view.interval();
  if (t_start > t_end || t_start < parent.start || t_end > parent.end) {
    throw Error(Errc::out_of_range, "slice [" + std::to_string(t_start) + ", " +
                                        std::to_string(t_end) + ") not inside [" +
                                        std::to_string(parent.start) + ", " +
                                        std::to_string(parent.end) + ")");
  }
  return {view.graph(), {t_start, t_end}, view.iter_granularity()};
}

struct ByEvents {
  std::size_t n = 1;
};
struct ByTime {
  TimeGranularity span = TimeGranularity::second;
};
using BatchSpec = std::variant<ByEvents, ByTime>;

/// Splits the view into consecutive slices of exactly `n` events (the last
/// may be shorter). Edge and node events are merged by timestamp; at equal
/// timestamps node events come first.
inline std::vector<EventSlice> iterate_by_events(const GraphView& view, std::size_t n) {
  if (n == 0) throw Error(Errc::validation, "batch size must be at least 1");
  const auto& ev = view.events();
  const auto& et = view.storage().edges().t;
  const auto& nt = view.storage().node_events().t;

  std::vector<EventSlice> batches;
  std::size_t ei = ev.edge_begin;
  std::size_t ni = ev.node_begin;
  while (ei < ev.edge_end || ni < ev.node_end) {
    EventSlice batch;
    batch.graph = view.graph();
    batch.edge_begin = ei;
    batch.node_begin = ni;
    Timestamp first = 0;
    Timestamp last = 0;
    for (std::size_t taken = 0; taken < n && (ei < ev.edge_end || ni < ev.node_end); ++taken) {
      const bool take_node = ni < ev.node_end && (ei == ev.edge_end || nt[ni] <= et[ei]);
      const Timestamp t = take_node ? nt[ni++] : et[ei++];
      if (taken == 0) first = t;
      last = t;
    }
    batch.edge_end = ei;
    batch.node_end = ni;
    batch.interval = {first, last + 1};
    batches.push_back(std::move(batch));
  }
  return batches;
}

/// Splits the view into consecutive fixed-span half-open intervals anchored at
/// the view start. Intervals without events still produce (empty) batches so
/// that batch k always covers snapshot k.
inline std::vector<EventSlice> iterate_by_time(const GraphView& view, TimeGranularity span) {
  const auto native = view.storage().granularity();
  if (!is_real_time(native) || !is_real_time(span)) {
    throw Error(Errc::excluded_granularity,
                "event-ordered granularity is excluded from time-based iteration");
  }
  const Bucketizer bucketizer(native, span);
  const auto& ev = view.events();
  std::vector<EventSlice> batches;
  if (ev.num_events() == 0) return batches;

  const auto& graph = view.storage();
  Timestamp t_last = 0;
  if (ev.num_edges() > 0) t_last = graph.edges().t[ev.edge_end - 1];
  if (ev.num_node_events() > 0) t_last = std::max(t_last, graph.node_events().t[ev.node_end - 1]);

  const Timestamp anchor = view.interval().start;
  const std::int64_t last_bucket = bucketizer.bucket(t_last - anchor);
  batches.reserve(static_cast<std::size_t>(last_bucket + 1));
  std::size_t edge_row = ev.edge_begin;
  std::size_t node_row = ev.node_begin;
  for (std::int64_t k = 0; k <= last_bucket; ++k) {
    EventSlice batch;
    batch.graph = view.graph();
    batch.interval = {anchor + bucketizer.bucket_start(k), anchor + bucketizer.bucket_start(k + 1)};
    batch.edge_begin = edge_row;
    batch.node_begin = node_row;
    edge_row = std::clamp(graph.lower_bound(batch.interval.end), ev.edge_begin, ev.edge_end);
    node_row = std::clamp(graph.node_lower_bound(batch.interval.end), ev.node_begin, ev.node_end);
    batch.edge_end = edge_row;
    batch.node_end = node_row;
    batches.push_back(std::move(batch));
  }
  return batches;
}

inline std::vector<EventSlice> iterate(const GraphView& view, const BatchSpec& spec) {
  return std::visit(
      [&](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, ByEvents>) {
          return iterate_by_events(view, s.n);
        } else {
          return iterate_by_time(view, s.span);
        }
      },
      spec);
}

}  // namespace tgraph
