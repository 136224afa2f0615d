#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tgraph/error.hpp"
#include "tgraph/granularity.hpp"
#include "tgraph/graph.hpp"

namespace tgraph {

enum class ReductionOp { first, last, sum, mean, max, count };

inline constexpr std::array<ReductionOp, 6> kAllReductions = {
    ReductionOp::first, ReductionOp::last, ReductionOp::sum,
    ReductionOp::mean,  ReductionOp::max,  ReductionOp::count};

constexpr std::string_view to_string(ReductionOp op) {
  switch (op) {
    case ReductionOp::first: return "first";
    case ReductionOp::last: return "last";
    case ReductionOp::sum: return "sum";
    case ReductionOp::mean: return "mean";
    case ReductionOp::max: return "max";
    case ReductionOp::count: return "count";
  }
  return "?";
}

inline std::optional<ReductionOp> parse_reduction(std::string_view name) {
  for (auto op : kAllReductions) {
    if (name == to_string(op)) return op;
  }
  return std::nullopt;
}

constexpr bool needs_features(ReductionOp op) {
  return op == ReductionOp::sum || op == ReductionOp::mean || op == ReductionOp::max;
}

/// Output feature width for a class of input width `dim`.
constexpr std::size_t reduced_dim(ReductionOp op, std::size_t dim) {
  return op == ReductionOp::count ? 1 : dim;
}

namespace detail {

struct KeyedRow {
  std::uint64_t key;
  std::uint32_t row;
  friend bool operator<(const KeyedRow& a, const KeyedRow& b) {
    return a.key != b.key ? a.key < b.key : a.row < b.row;
  }
};

// Appends the reduction of one class to `out`; `row_at(j)` is the class's
// j-th row in time order.
template <typename RowAt>
void reduce_into(ReductionOp op, std::size_t count, RowAt row_at, std::span<const double> feat,
                 std::size_t dim, std::vector<double>& out) {
  if (op == ReductionOp::count) {
    out.push_back(static_cast<double>(count));
    return;
  }
  const double* f = feat.data();
  const std::size_t base = out.size();
  const std::size_t seed = op == ReductionOp::last ? row_at(count - 1) : row_at(0);
  for (std::size_t c = 0; c < dim; ++c) out.push_back(f[seed * dim + c]);
  if (op == ReductionOp::first || op == ReductionOp::last) return;

  double* acc = out.data() + base;
  for (std::size_t j = 1; j < count; ++j) {
    const double* x = f + row_at(j) * dim;
    for (std::size_t c = 0; c < dim; ++c) {
      acc[c] = op == ReductionOp::max ? std::max(acc[c], x[c]) : acc[c] + x[c];
    }
  }
  if (op == ReductionOp::mean) {
    for (std::size_t c = 0; c < dim; ++c) acc[c] /= static_cast<double>(count);
  }
}

// Stable LSD radix sort of `words` on bits [lo, hi).
template <unsigned kDigit>
void radix_sort_bits(std::vector<std::uint64_t>& words, std::vector<std::uint64_t>& tmp,
                     unsigned lo, unsigned hi) {
  constexpr std::uint64_t kMask = (std::uint64_t{1} << kDigit) - 1;
  std::array<std::size_t, kMask + 1> count;
  tmp.resize(words.size());
  for (unsigned shift = lo; shift < hi; shift += kDigit) {
    count.fill(0);
    for (auto w : words) ++count[(w >> shift) & kMask];
    std::size_t sum = 0;
    for (auto& c : count) sum += std::exchange(c, sum);
    for (auto w : words) tmp[count[(w >> shift) & kMask]++] = w;
    words.swap(tmp);
  }
}

// Visits every (bucket, key) class of the time-sorted rows in (bucket, key)
// order as visit(bucket, key, count, row_at). Keys must be below 2^key_bits.
template <typename KeyOf, typename Visit>
void for_each_class(std::span<const Timestamp> t, Timestamp anchor, const Bucketizer& bucketizer,
                    KeyOf key_of, unsigned key_bits, Visit visit) {
  const std::size_t n = t.size();
  std::vector<std::uint64_t> packed;
  std::vector<std::uint64_t> tmp;
  std::vector<KeyedRow> wide;
  for (std::size_t begin = 0; begin < n;) {
    const std::int64_t k = bucketizer.bucket(t[begin] - anchor);
    const Timestamp next_start = bucketizer.bucket_start(k + 1);
    std::size_t end = begin + 1;
    while (end < n && t[end] - anchor < next_start) ++end;
    const std::size_t len = end - begin;

    if (len == 1) {
      visit(k, key_of(begin), 1, [begin](std::size_t) { return begin; });
    } else if (const unsigned offset_bits = std::bit_width(len); key_bits + offset_bits <= 64) {
      // plain words of (key, offset); the offset keeps equal keys in time order
      packed.clear();
      for (std::size_t i = begin; i < end; ++i) {
        packed.push_back(key_of(i) << offset_bits | (i - begin));
      }
      // words start in offset order, so a stable sort on the key bits suffices
      if (len >= 2048) {
        radix_sort_bits<11>(packed, tmp, offset_bits, offset_bits + key_bits);
      } else if (len >= 16) {
        radix_sort_bits<8>(packed, tmp, offset_bits, offset_bits + key_bits);
      } else {
        std::sort(packed.begin(), packed.end());
      }
      const std::uint64_t mask = (std::uint64_t{1} << offset_bits) - 1;
      for (std::size_t g = 0; g < len;) {
        const std::uint64_t key = packed[g] >> offset_bits;
        std::size_t h = g + 1;
        while (h < len && packed[h] >> offset_bits == key) ++h;
        visit(k, key, h - g, [&, g](std::size_t j) { return begin + (packed[g + j] & mask); });
        g = h;
      }
    } else {
      wide.clear();
      for (std::size_t i = begin; i < end; ++i) {
        wide.push_back({key_of(i), static_cast<std::uint32_t>(i)});
      }
      std::sort(wide.begin(), wide.end());
      for (std::size_t g = 0; g < len;) {
        std::size_t h = g + 1;
        while (h < len && wide[h].key == wide[g].key) ++h;
        visit(k, wide[g].key, h - g, [&, g](std::size_t j) { return std::size_t{wide[g + j].row}; });
        g = h;
      }
    }
    begin = end;
  }
}

}  // namespace detail

/// Collapses `graph` onto the coarser granularity `coarse`. Output timestamps
/// are bucket indices counted from the graph's earliest event; each
/// (bucket, src, dst) edge class and (bucket, node) node-event class becomes a
/// single event whose features are `reduce` applied in time order.
inline GraphPtr discretize(const TemporalGraph& graph, TimeGranularity coarse,
                           ReductionOp reduce = ReductionOp::last) {
  const auto native = graph.granularity();
  if (!is_real_time(native)) {
    throw Error(Errc::excluded_granularity, "cannot discretize an event-ordered graph");
  }
  const Bucketizer bucketizer(native, coarse);

  const auto& e = graph.edges();
  const auto& n = graph.node_events();
  if (needs_features(reduce) &&
      ((e.size() > 0 && e.feat_dim == 0) || (n.size() > 0 && n.feat_dim == 0))) {
    throw Error(Errc::reduction_requires_features,
                std::string("reduction '") + std::string(to_string(reduce)) +
                    "' needs event features");
  }
  if (graph.num_events() > std::size_t{0xffffffff}) {
    throw Error(Errc::validation, "graph too large to discretize");
  }

  const Timestamp anchor = graph.t_min().value_or(0);
  // (src, dst) packed densely so more of the key fits beside the row offset
  const unsigned id_bits = std::bit_width(std::max<std::size_t>(graph.node_id_bound(), 1) - 1);
  const std::uint64_t id_mask = (std::uint64_t{1} << id_bits) - 1;

  EdgeColumns out_edges;
  out_edges.feat_dim = reduced_dim(reduce, e.feat_dim);
  out_edges.t.reserve(e.size());
  out_edges.src.reserve(e.size());
  out_edges.dst.reserve(e.size());
  out_edges.feat.reserve(e.size() * out_edges.feat_dim);
  detail::for_each_class(
      e.t, anchor, bucketizer,
      [&](std::size_t i) {
        return static_cast<std::uint64_t>(e.src[i]) << id_bits |
               static_cast<std::uint64_t>(e.dst[i]);
      },
      2 * id_bits,
      [&](std::int64_t k, std::uint64_t key, std::size_t count, auto row_at) {
        out_edges.t.push_back(k);
        out_edges.src.push_back(static_cast<NodeId>(key >> id_bits));
        out_edges.dst.push_back(static_cast<NodeId>(key & id_mask));
        detail::reduce_into(reduce, count, row_at, e.feat, e.feat_dim, out_edges.feat);
      });

  NodeEventColumns out_nodes;
  out_nodes.feat_dim = reduced_dim(reduce, n.feat_dim);
  detail::for_each_class(
      n.t, anchor, bucketizer, [&](std::size_t i) { return static_cast<std::uint64_t>(n.node[i]); },
      id_bits, [&](std::int64_t k, std::uint64_t key, std::size_t count, auto row_at) {
        out_nodes.t.push_back(k);
        out_nodes.node.push_back(static_cast<NodeId>(key));
        detail::reduce_into(reduce, count, row_at, n.feat, n.feat_dim, out_nodes.feat);
      });

  return detail::adopt_columns(graph, std::move(out_edges), std::move(out_nodes), coarse,
                               SnapshotOrigin{anchor, native});
}

/// Native-time start of snapshot `k` of a discretized graph.
inline Timestamp snapshot_start(const TemporalGraph& discretized, std::int64_t k) {
  const auto& origin = discretized.origin();
  if (!origin) throw Error(Errc::validation, "graph was not produced by discretize");
  const Bucketizer bucketizer(origin->source, discretized.granularity());
  return origin->origin + bucketizer.bucket_start(k);
}

}  // namespace tgraph
