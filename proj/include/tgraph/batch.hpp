#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "tgraph/error.hpp"
#include "tgraph/view.hpp"

namespace tgraph {

/// Dense row-major array with its shape. Integer payloads carry ids, times and
/// row references; real payloads carry features and scores.
struct Tensor {
  std::vector<std::size_t> shape;
  std::variant<std::vector<std::int64_t>, std::vector<double>> data;

  static Tensor ints(std::vector<std::size_t> shape, std::vector<std::int64_t> values) {
    return {std::move(shape), std::move(values)};
  }
  static Tensor reals(std::vector<std::size_t> shape, std::vector<double> values) {
    return {std::move(shape), std::move(values)};
  }

  const std::vector<std::int64_t>& as_ints() const {
    if (auto* v = std::get_if<std::vector<std::int64_t>>(&data)) return *v;
    throw Error(Errc::validation, "tensor does not hold integers");
  }
  const std::vector<double>& as_reals() const {
    if (auto* v = std::get_if<std::vector<double>>(&data)) return *v;
    throw Error(Errc::validation, "tensor does not hold reals");
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

namespace attr {
inline constexpr const char* src = "src";
inline constexpr const char* dst = "dst";
inline constexpr const char* time = "time";
inline constexpr const char* edge_feat = "edge_feat";
inline constexpr const char* node_events = "node_events";
inline constexpr const char* negatives = "negatives";
inline constexpr const char* neighbors = "neighbors";
inline constexpr const char* scores = "scores";
}  // namespace attr

using AttrSet = std::set<std::string>;

/// Attributes every batch carries before any hook runs.
inline const AttrSet& builtin_attrs() {
  static const AttrSet builtins = {attr::src, attr::dst, attr::time, attr::edge_feat,
                                   attr::node_events};
  return builtins;
}

struct MaterializedBatch {
  EventSlice slice;
  std::map<std::string, Tensor> attrs;

  bool has(const std::string& name) const { return attrs.contains(name); }
  const Tensor& at(const std::string& name) const {
    const auto it = attrs.find(name);
    if (it == attrs.end()) throw Error(Errc::missing_attribute, "batch has no '" + name + "'");
    return it->second;
  }
  AttrSet attr_names() const {
    AttrSet names;
    for (const auto& [name, _] : attrs) names.insert(name);
    return names;
  }
};

/// Batch with only the built-in attributes filled from the slice's columns.
/// `node_events` is an n x 2 table of (time, node).
inline MaterializedBatch make_batch(const EventSlice& slice) {
  MaterializedBatch batch;
  batch.slice = slice;
  const auto n = slice.num_edges();
  const auto src = slice.src();
  const auto dst = slice.dst();
  const auto time = slice.edge_time();
  const auto feat = slice.edge_feat();
  batch.attrs[attr::src] = Tensor::ints({n}, {src.begin(), src.end()});
  batch.attrs[attr::dst] = Tensor::ints({n}, {dst.begin(), dst.end()});
  batch.attrs[attr::time] = Tensor::ints({n}, {time.begin(), time.end()});
  batch.attrs[attr::edge_feat] =
      Tensor::reals({n, slice.graph->edges().feat_dim}, {feat.begin(), feat.end()});

  const auto m = slice.num_node_events();
  std::vector<std::int64_t> node_table;
  node_table.reserve(2 * m);
  const auto nt = slice.node_time();
  const auto ids = slice.node_ids();
  for (std::size_t i = 0; i < m; ++i) {
    node_table.push_back(nt[i]);
    node_table.push_back(ids[i]);
  }
  batch.attrs[attr::node_events] = Tensor::ints({m, 2}, std::move(node_table));
  return batch;
}

}  // namespace tgraph
