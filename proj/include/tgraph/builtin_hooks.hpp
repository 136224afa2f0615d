#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "tgraph/batch.hpp"
#include "tgraph/eval.hpp"
#include "tgraph/hooks.hpp"
#include "tgraph/sampling.hpp"

namespace tgraph {

namespace detail {

// Packs ragged lists into an n x width table padded with -1.
inline Tensor pad_lists(const std::vector<std::vector<NodeId>>& lists) {
  std::size_t width = 0;
  for (const auto& l : lists) width = std::max(width, l.size());
  std::vector<std::int64_t> data(lists.size() * width, -1);
  for (std::size_t i = 0; i < lists.size(); ++i) {
    std::copy(lists[i].begin(), lists[i].end(), data.begin() + static_cast<std::ptrdiff_t>(i * width));
  }
  return Tensor::ints({lists.size(), width}, std::move(data));
}

// Seeds for link prediction: all sources, all destinations, then every valid
// negative in row-major order.
inline std::vector<NodeId> link_seeds(const MaterializedBatch& batch) {
  std::vector<NodeId> seeds(batch.slice.src().begin(), batch.slice.src().end());
  seeds.insert(seeds.end(), batch.slice.dst().begin(), batch.slice.dst().end());
  for (auto n : batch.at(attr::negatives).as_ints()) {
    if (n >= 0) seeds.push_back(n);
  }
  return seeds;
}

// seeds x want x (node, time, row), padded with -1.
inline Tensor neighbor_tensor(const NeighborLists& lists, std::size_t want) {
  std::vector<std::int64_t> data(lists.size() * want * 3, -1);
  for (std::size_t i = 0; i < lists.size(); ++i) {
    for (std::size_t j = 0; j < lists[i].size(); ++j) {
      const auto base = (i * want + j) * 3;
      data[base] = lists[i][j].node;
      data[base + 1] = lists[i][j].t;
      data[base + 2] = lists[i][j].row;
    }
  }
  return Tensor::ints({lists.size(), want, 3}, std::move(data));
}

}  // namespace detail

/// Draws `q` uniform negatives per positive from node ids [0, num_nodes).
/// The draw for the i-th batch depends on (seed, i); reset rewinds i.
class NegativeSamplerHook final : public Hook {
 public:
  NegativeSamplerHook(std::size_t num_nodes, std::size_t q, std::uint64_t seed)
      : Hook({"negative-sampler", {}, {attr::negatives}, true}), universe_(num_nodes), q_(q),
        seed_(seed) {
    std::iota(universe_.begin(), universe_.end(), NodeId{0});
  }

  void apply(MaterializedBatch& batch) override {
    std::vector<PositiveEdge> positives;
    const auto src = batch.slice.src();
    const auto dst = batch.slice.dst();
    const auto t = batch.slice.edge_time();
    for (std::size_t i = 0; i < src.size(); ++i) positives.push_back({src[i], dst[i], t[i]});
    const auto negatives =
        sample_uniform_negatives(detail::mix_seed(seed_, batches_++), positives, universe_, q_);
    auto table = detail::pad_lists(negatives.lists);
    table.shape[1] = q_;
    batch.attrs[attr::negatives] = std::move(table);
  }

  void reset() override { batches_ = 0; }

 private:
  std::vector<NodeId> universe_;
  std::size_t q_;
  std::uint64_t seed_;
  std::uint64_t batches_ = 0;
};

/// Serves fixed evaluation negatives, loaded up front. `first_row` is the
/// storage row of the edge that `negatives.lists[0]` belongs to.
class EvalNegativesHook final : public Hook {
 public:
  EvalNegativesHook(std::size_t first_row, NegativeSet negatives)
      : Hook({"eval-negatives", {}, {attr::negatives}, false}), first_row_(first_row),
        negatives_(std::move(negatives)) {}

  void apply(MaterializedBatch& batch) override {
    const auto& s = batch.slice;
    if (s.num_edges() > 0 &&
        (s.edge_begin < first_row_ || s.edge_end - first_row_ > negatives_.size())) {
      throw Error(Errc::out_of_range, "batch rows [" + std::to_string(s.edge_begin) + ", " +
                                          std::to_string(s.edge_end) +
                                          ") have no evaluation negatives");
    }
    std::vector<std::vector<NodeId>> lists;
    for (std::size_t r = s.edge_begin; r < s.edge_end; ++r) {
      lists.push_back(negatives_.lists[r - first_row_]);
    }
    batch.attrs[attr::negatives] = detail::pad_lists(lists);
  }

 private:
  std::size_t first_row_;
  NegativeSet negatives_;
};

/// Most-recent-neighbor sampler. Each batch is answered from edges strictly
/// before it, then its own edges enter the buffers.
class RecencySamplerHook final : public Hook {
 public:
  RecencySamplerHook(std::size_t capacity, std::size_t want)
      : Hook({"recency-sampler", {attr::negatives}, {attr::neighbors}, true}),
        buffer_(capacity), want_(want) {
    if (want_ > capacity) throw Error(Errc::capacity, "want exceeds buffer capacity");
  }

  void apply(MaterializedBatch& batch) override {
    const auto seeds = detail::link_seeds(batch);
    batch.attrs[attr::neighbors] = detail::neighbor_tensor(buffer_.query(seeds, want_), want_);
    buffer_.update(batch.slice);
  }

  void reset() override { buffer_.clear(); }

  const RecencyBuffer& buffer() const { return buffer_; }

 private:
  RecencyBuffer buffer_;
  std::size_t want_;
};

/// Uniform historical sampler over a prebuilt adjacency; neighbors come from
/// strictly before the batch interval.
class UniformSamplerHook final : public Hook {
 public:
  UniformSamplerHook(std::shared_ptr<const TemporalAdjacency> adjacency, std::size_t want,
                     std::uint64_t seed)
      : Hook({"uniform-sampler", {attr::negatives}, {attr::neighbors}, false}),
        adjacency_(std::move(adjacency)), want_(want), seed_(seed) {}

  void apply(MaterializedBatch& batch) override {
    const auto seeds = detail::link_seeds(batch);
    const auto lists = uniform_query(*adjacency_, seeds, batch.slice.interval.start, want_, seed_);
    batch.attrs[attr::neighbors] = detail::neighbor_tensor(lists, want_);
  }

 private:
  std::shared_ptr<const TemporalAdjacency> adjacency_;
  std::size_t want_;
  std::uint64_t seed_;
};

/// EdgeBank as a hook: scores each positive (column 0) and its negatives,
/// then memorizes the batch. Score rows are padded with -1 where a negative
/// slot is empty.
class EdgeBankHook final : public Hook {
 public:
  EdgeBankHook() : Hook({"edgebank", {attr::negatives}, {attr::scores}, true}) {}

  void apply(MaterializedBatch& batch) override {
    const auto src = batch.slice.src();
    const auto dst = batch.slice.dst();
    const auto& neg = batch.at(attr::negatives);
    const std::size_t width = neg.shape.size() == 2 ? neg.shape[1] : 0;
    const auto& ids = neg.as_ints();
    std::vector<double> scores(src.size() * (width + 1), -1.0);
    for (std::size_t i = 0; i < src.size(); ++i) {
      scores[i * (width + 1)] = memory_.contains(src[i], dst[i]) ? 1.0 : 0.0;
      for (std::size_t j = 0; j < width; ++j) {
        const auto n = ids[i * width + j];
        if (n >= 0) scores[i * (width + 1) + 1 + j] = memory_.contains(src[i], n) ? 1.0 : 0.0;
      }
    }
    batch.attrs[attr::scores] = Tensor::reals({src.size(), width + 1}, std::move(scores));
    memory_.update(batch.slice);
  }

  void reset() override { memory_.clear(); }

  const EdgeBankMemory& memory() const { return memory_; }

 private:
  EdgeBankMemory memory_;
};

}  // namespace tgraph
