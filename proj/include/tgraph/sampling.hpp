#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tgraph/error.hpp"
#include "tgraph/graph.hpp"
#include "tgraph/view.hpp"

namespace tgraph {

struct TemporalNeighbor {
  NodeId node = 0;
  Timestamp t = 0;
  std::int64_t row = 0;  // edge row in the source graph

  friend bool operator==(const TemporalNeighbor&, const TemporalNeighbor&) = default;
};

/// One list per query seed, in query order.
using NeighborLists = std::vector<std::vector<TemporalNeighbor>>;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  return splitmix64(splitmix64(splitmix64(a) ^ b) ^ c);
}

// Resolves each distinct seed once and copies the result to duplicates.
template <typename Lookup>
NeighborLists fan_out(std::span<const NodeId> seeds, Lookup lookup) {
  NeighborLists out(seeds.size());
  std::unordered_map<NodeId, std::size_t> first_index;
  first_index.reserve(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto [it, inserted] = first_index.try_emplace(seeds[i], i);
    out[i] = inserted ? lookup(seeds[i]) : out[it->second];
  }
  return out;
}

}  // namespace detail

/// Per-node ring buffers holding the `capacity` most recent neighbors seen in
/// the stream. Each edge is recorded at both endpoints.
class RecencyBuffer {
 public:
  explicit RecencyBuffer(std::size_t capacity, std::size_t num_nodes = 0) : capacity_(capacity) {
    if (capacity_ == 0) throw Error(Errc::capacity, "recency buffer capacity must be positive");
    grow(num_nodes);
  }

  std::size_t capacity() const { return capacity_; }
  std::optional<Timestamp> last_time() const { return last_time_; }

  std::size_t fill(NodeId node) const {
    const auto i = static_cast<std::size_t>(node);
    return node >= 0 && i < fill_.size() ? fill_[i] : 0;
  }

  /// Appends a batch of edges. Timestamps must not go backwards, neither
  /// within the batch nor relative to earlier batches.
  void update(std::span<const NodeId> src, std::span<const NodeId> dst,
              std::span<const Timestamp> t, std::span<const std::int64_t> row) {
    if (src.size() != dst.size() || src.size() != t.size() || src.size() != row.size()) {
      throw Error(Errc::dimension_mismatch, "recency update columns differ in length");
    }
    std::optional<Timestamp> prev = last_time_;
    NodeId max_id = -1;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (prev && t[i] < *prev) {
        throw Error(Errc::stream_order, "edge at t=" + std::to_string(t[i]) +
                                            " arrives after t=" + std::to_string(*prev));
      }
      if (src[i] < 0 || dst[i] < 0) throw Error(Errc::validation, "negative node id");
      prev = t[i];
      max_id = std::max({max_id, src[i], dst[i]});
    }
    grow(static_cast<std::size_t>(max_id + 1));
    for (std::size_t i = 0; i < t.size(); ++i) {
      push(src[i], {dst[i], t[i], row[i]});
      push(dst[i], {src[i], t[i], row[i]});
    }
    last_time_ = prev;
  }

  /// Records the edges of a loader slice, using their storage rows.
  void update(const EventSlice& slice) {
    std::vector<std::int64_t> rows(slice.num_edges());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i] = static_cast<std::int64_t>(slice.edge_begin + i);
    }
    update(slice.src(), slice.dst(), slice.edge_time(), rows);
  }

  /// Up to `want` most recent neighbors per seed, newest first.
  NeighborLists query(std::span<const NodeId> seeds, std::size_t want) const {
    if (want > capacity_) {
      throw Error(Errc::capacity, "requested " + std::to_string(want) +
                                      " neighbors from a buffer of capacity " +
                                      std::to_string(capacity_));
    }
    return detail::fan_out(seeds, [&](NodeId node) { return lookup(node, want); });
  }

  void clear() {
    std::fill(cursor_.begin(), cursor_.end(), 0);
    std::fill(fill_.begin(), fill_.end(), 0);
    last_time_.reset();
  }

 private:
  void grow(std::size_t num_nodes) {
    if (num_nodes <= fill_.size()) return;
    slots_.resize(num_nodes * capacity_);
    cursor_.resize(num_nodes, 0);
    fill_.resize(num_nodes, 0);
  }

  void push(NodeId node, TemporalNeighbor entry) {
    const auto i = static_cast<std::size_t>(node);
    slots_[i * capacity_ + cursor_[i]] = entry;
    cursor_[i] = (cursor_[i] + 1) % capacity_;
    fill_[i] = std::min(fill_[i] + 1, capacity_);
  }

  std::vector<TemporalNeighbor> lookup(NodeId node, std::size_t want) const {
    std::vector<TemporalNeighbor> out;
    const std::size_t count = std::min(want, fill(node));
    if (count == 0) return out;
    const auto i = static_cast<std::size_t>(node);
    out.reserve(count);
    std::size_t pos = cursor_[i];
    for (std::size_t j = 0; j < count; ++j) {
      pos = (pos + capacity_ - 1) % capacity_;
      out.push_back(slots_[i * capacity_ + pos]);
    }
    return out;
  }

  std::size_t capacity_;
  std::vector<TemporalNeighbor> slots_;
  std::vector<std::size_t> cursor_;
  std::vector<std::size_t> fill_;
  std::optional<Timestamp> last_time_;
};

/// Per-node time-sorted neighbor index (both directions of every edge),
/// built once over a view.
class TemporalAdjacency {
 public:
  explicit TemporalAdjacency(const GraphView& view) {
    const auto& slice = view.events();
    const auto src = slice.src();
    const auto dst = slice.dst();
    const auto time = slice.edge_time();
    const std::size_t bound = view.storage().node_id_bound();
    offsets_.assign(bound + 1, 0);
    for (std::size_t i = 0; i < src.size(); ++i) {
      ++offsets_[static_cast<std::size_t>(src[i]) + 1];
      ++offsets_[static_cast<std::size_t>(dst[i]) + 1];
    }
    for (std::size_t v = 0; v < bound; ++v) offsets_[v + 1] += offsets_[v];
    entries_.resize(offsets_.back());
    std::vector<std::size_t> next(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < src.size(); ++i) {
      const auto row = static_cast<std::int64_t>(slice.edge_begin + i);
      entries_[next[static_cast<std::size_t>(src[i])]++] = {dst[i], time[i], row};
      entries_[next[static_cast<std::size_t>(dst[i])]++] = {src[i], time[i], row};
    }
  }

  std::size_t num_entries() const { return entries_.size(); }

  /// All neighbors of `node`, ascending by time.
  std::span<const TemporalNeighbor> neighbors(NodeId node) const {
    const auto i = static_cast<std::size_t>(node);
    if (node < 0 || i + 1 >= offsets_.size()) return {};
    return std::span<const TemporalNeighbor>(entries_).subspan(offsets_[i],
                                                               offsets_[i + 1] - offsets_[i]);
  }

  /// Neighbors of `node` strictly before `cut`.
  std::span<const TemporalNeighbor> neighbors_before(NodeId node, Timestamp cut) const {
    const auto all = neighbors(node);
    const auto it = std::lower_bound(all.begin(), all.end(), cut,
                                     [](const TemporalNeighbor& e, Timestamp t) { return e.t < t; });
    return all.first(static_cast<std::size_t>(it - all.begin()));
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<TemporalNeighbor> entries_;
};

namespace detail {

// Uniform sample of min(want, |candidates|) entries without replacement,
// returned newest first. The draw depends only on (rng_seed, node, cut).
inline std::vector<TemporalNeighbor> sample_before(const TemporalAdjacency& adj, NodeId node,
                                                   Timestamp cut, std::size_t want,
                                                   std::uint64_t rng_seed) {
  const auto candidates = adj.neighbors_before(node, cut);
  const std::size_t c = candidates.size();
  std::vector<std::size_t> picked;
  if (c <= want) {
    picked.resize(c);
    for (std::size_t i = 0; i < c; ++i) picked[i] = i;
  } else {
    // Floyd's algorithm: `want` distinct indices in [0, c).
    std::mt19937_64 gen(mix_seed(rng_seed, static_cast<std::uint64_t>(node),
                                 static_cast<std::uint64_t>(cut)));
    picked.reserve(want);
    for (std::size_t j = c - want; j < c; ++j) {
      std::uniform_int_distribution<std::size_t> pick(0, j);
      const std::size_t r = pick(gen);
      if (std::find(picked.begin(), picked.end(), r) == picked.end()) {
        picked.push_back(r);
      } else {
        picked.push_back(j);
      }
    }
  }
  std::sort(picked.begin(), picked.end(), std::greater<>());
  std::vector<TemporalNeighbor> out;
  out.reserve(picked.size());
  for (auto i : picked) out.push_back(candidates[i]);
  return out;
}

}  // namespace detail

/// For each seed, up to `want` neighbors drawn uniformly from its history
/// strictly before `t`, newest first.
inline NeighborLists uniform_query(const TemporalAdjacency& adj, std::span<const NodeId> seeds,
                                   Timestamp t, std::size_t want, std::uint64_t rng_seed) {
  return detail::fan_out(seeds, [&](NodeId node) {
    return detail::sample_before(adj, node, t, want, rng_seed);
  });
}

/// Layered temporal neighborhood. `hops[0][i]` samples seed i before `t`;
/// `hops[h][j]` samples the j-th entry of the flattened layer h-1, cut at
/// that entry's own timestamp so every path runs backwards in time.
struct MultiHopSample {
  std::vector<NeighborLists> hops;
};

inline MultiHopSample multihop_query(const TemporalAdjacency& adj, std::span<const NodeId> seeds,
                                     Timestamp t, std::span<const std::size_t> fanouts,
                                     std::uint64_t rng_seed) {
  if (fanouts.empty()) throw Error(Errc::validation, "fanouts must be non-empty");
  MultiHopSample sample;
  sample.hops.push_back(uniform_query(adj, seeds, t, fanouts[0], rng_seed));
  for (std::size_t h = 1; h < fanouts.size(); ++h) {
    const std::uint64_t hop_seed = detail::mix_seed(rng_seed, h);
    NeighborLists layer;
    for (const auto& parent_list : sample.hops.back()) {
      for (const auto& parent : parent_list) {
        layer.push_back(detail::sample_before(adj, parent.node, parent.t, fanouts[h], hop_seed));
      }
    }
    sample.hops.push_back(std::move(layer));
  }
  return sample;
}

}  // namespace tgraph
