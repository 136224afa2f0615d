#pragma once

// Dictionary-based discretization: one map entry per (bucket, src, dst) class
// holding every member's feature vector. Used as the benchmark baseline.

#include <algorithm>
#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "tgraph/discretize.hpp"
#include "tgraph/graph.hpp"

namespace tgraph::reference {

namespace detail {

inline std::vector<double> reduce_naive(ReductionOp op, const std::vector<std::vector<double>>& members) {
  if (op == ReductionOp::count) return {static_cast<double>(members.size())};
  if (op == ReductionOp::first) return members.front();
  if (op == ReductionOp::last) return members.back();
  std::vector<double> acc = members.front();
  for (std::size_t m = 1; m < members.size(); ++m) {
    for (std::size_t c = 0; c < acc.size(); ++c) {
      acc[c] = op == ReductionOp::max ? std::max(acc[c], members[m][c]) : acc[c] + members[m][c];
    }
  }
  if (op == ReductionOp::mean) {
    for (auto& v : acc) v /= static_cast<double>(members.size());
  }
  return acc;
}

inline std::int64_t naive_bucket(Timestamp t, Timestamp anchor, TimeGranularity native,
                                 TimeGranularity coarse) {
  const __int128 seconds = static_cast<__int128>(t - anchor) * tick_seconds(native);
  return static_cast<std::int64_t>(seconds / tick_seconds(coarse));
}

}  // namespace detail

inline GraphPtr naive_discretize(const TemporalGraph& graph, TimeGranularity coarse,
                                 ReductionOp reduce) {
  const auto native = graph.granularity();
  if (!is_real_time(native) || !is_real_time(coarse)) {
    throw Error(Errc::excluded_granularity, "event-ordered granularity");
  }
  if (tick_seconds(coarse) < tick_seconds(native)) {
    throw Error(Errc::granularity_order, "target finer than native");
  }
  const auto& e = graph.edges();
  const auto& n = graph.node_events();
  if (needs_features(reduce) &&
      ((e.size() > 0 && e.feat_dim == 0) || (n.size() > 0 && n.feat_dim == 0))) {
    throw Error(Errc::reduction_requires_features, "featureless");
  }
  const Timestamp anchor = graph.t_min().value_or(0);

  std::map<std::tuple<std::int64_t, NodeId, NodeId>, std::vector<std::vector<double>>> edge_groups;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto k = detail::naive_bucket(e.t[i], anchor, native, coarse);
    const auto row = e.feat_row(i);
    edge_groups[{k, e.src[i], e.dst[i]}].emplace_back(row.begin(), row.end());
  }
  std::map<std::tuple<std::int64_t, NodeId>, std::vector<std::vector<double>>> node_groups;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const auto k = detail::naive_bucket(n.t[i], anchor, native, coarse);
    const auto row = n.feat_row(i);
    node_groups[{k, n.node[i]}].emplace_back(row.begin(), row.end());
  }

  EdgeColumns out_e;
  out_e.feat_dim = reduced_dim(reduce, e.feat_dim);
  for (const auto& [key, members] : edge_groups) {
    out_e.t.push_back(std::get<0>(key));
    out_e.src.push_back(std::get<1>(key));
    out_e.dst.push_back(std::get<2>(key));
    const auto v = detail::reduce_naive(reduce, members);
    out_e.feat.insert(out_e.feat.end(), v.begin(), v.end());
  }
  NodeEventColumns out_n;
  out_n.feat_dim = reduced_dim(reduce, n.feat_dim);
  for (const auto& [key, members] : node_groups) {
    out_n.t.push_back(std::get<0>(key));
    out_n.node.push_back(std::get<1>(key));
    const auto v = detail::reduce_naive(reduce, members);
    out_n.feat.insert(out_n.feat.end(), v.begin(), v.end());
  }
  return TemporalGraph::from_columns(std::move(out_e), std::move(out_n), coarse);
}

}  // namespace tgraph::reference
