#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "tgraph/error.hpp"
#include "tgraph/graph.hpp"
#include "tgraph/sampling.hpp"
#include "tgraph/view.hpp"

namespace tgraph {

/// Unlimited-memory EdgeBank: a pair scores 1 once it has been observed.
class EdgeBankMemory {
 public:
  std::vector<double> predict(std::span<const NodeId> src, std::span<const NodeId> dst) const {
    if (src.size() != dst.size()) {
      throw Error(Errc::dimension_mismatch, "edgebank query columns differ in length");
    }
    std::vector<double> scores(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) scores[i] = contains(src[i], dst[i]) ? 1.0 : 0.0;
    return scores;
  }

  bool contains(NodeId src, NodeId dst) const { return pairs_.contains(pair_key(src, dst)); }

  void update(std::span<const NodeId> src, std::span<const NodeId> dst) {
    if (src.size() != dst.size()) {
      throw Error(Errc::dimension_mismatch, "edgebank update columns differ in length");
    }
    for (std::size_t i = 0; i < src.size(); ++i) pairs_.insert(pair_key(src[i], dst[i]));
  }

  void update(const EventSlice& slice) { update(slice.src(), slice.dst()); }

  std::size_t size() const { return pairs_.size(); }
  void clear() { pairs_.clear(); }

 private:
  std::unordered_set<std::uint64_t> pairs_;
};

struct PositiveEdge {
  NodeId src = 0;
  NodeId dst = 0;
  Timestamp t = 0;
};

/// Candidate negative destinations, one list per positive edge.
struct NegativeSet {
  std::vector<std::vector<NodeId>> lists;

  std::size_t size() const { return lists.size(); }
};

/// Throws unless every list avoids its positive's destination.
inline void check_negatives(const NegativeSet& negatives, std::span<const PositiveEdge> positives) {
  if (negatives.size() != positives.size()) {
    throw Error(Errc::dimension_mismatch,
                std::to_string(negatives.size()) + " negative lists for " +
                    std::to_string(positives.size()) + " positives");
  }
  for (std::size_t i = 0; i < positives.size(); ++i) {
    for (auto n : negatives.lists[i]) {
      if (n == positives[i].dst) {
        throw Error(Errc::validation,
                    "negatives of positive " + std::to_string(i) + " include its destination");
      }
    }
  }
}

/// `q` distinct destinations per positive drawn uniformly from `universe`
/// minus the true destination.
inline NegativeSet sample_uniform_negatives(std::uint64_t rng_seed,
                                            std::span<const PositiveEdge> positives,
                                            std::span<const NodeId> universe, std::size_t q) {
  if (universe.empty()) throw Error(Errc::validation, "empty node universe");
  if (q >= universe.size()) {
    throw Error(Errc::exhaustion, "cannot draw " + std::to_string(q) +
                                      " negatives from a universe of " +
                                      std::to_string(universe.size()));
  }
  std::mt19937_64 gen(detail::splitmix64(rng_seed));
  NegativeSet out;
  out.lists.resize(positives.size());
  std::vector<std::size_t> picked;
  for (std::size_t p = 0; p < positives.size(); ++p) {
    const auto excluded_it = std::find(universe.begin(), universe.end(), positives[p].dst);
    const bool has_excluded = excluded_it != universe.end();
    const auto excluded = static_cast<std::size_t>(excluded_it - universe.begin());
    const std::size_t pool = universe.size() - (has_excluded ? 1 : 0);

    picked.clear();
    for (std::size_t j = pool - q; j < pool; ++j) {
      std::uniform_int_distribution<std::size_t> pick(0, j);
      const std::size_t r = pick(gen);
      picked.push_back(std::find(picked.begin(), picked.end(), r) == picked.end() ? r : j);
    }
    auto& list = out.lists[p];
    list.reserve(q);
    for (auto i : picked) {
      // pool index -> universe index, skipping the excluded slot
      const std::size_t u = has_excluded && i >= excluded ? i + 1 : i;
      list.push_back(universe[u]);
    }
  }
  return out;
}

/// Reciprocal rank of the positive among the negatives; ties count half.
inline double mrr(double pos_score, std::span<const double> neg_scores) {
  if (!std::isfinite(pos_score)) throw Error(Errc::validation, "non-finite positive score");
  std::size_t greater = 0;
  std::size_t equal = 0;
  for (double s : neg_scores) {
    if (!std::isfinite(s)) throw Error(Errc::validation, "non-finite negative score");
    if (s > pos_score) {
      ++greater;
    } else if (s == pos_score) {
      ++equal;
    }
  }
  const double rank = 1.0 + static_cast<double>(greater) + static_cast<double>(equal) / 2.0;
  return 1.0 / rank;
}

/// NDCG over the top `k` items ranked by prediction, linear gain. Prediction
/// ties keep input order.
inline double ndcg_at_k(std::span<const double> pred, std::span<const double> relevance,
                        std::size_t k) {
  if (k == 0) throw Error(Errc::validation, "ndcg cutoff k must be positive");
  if (pred.size() != relevance.size()) {
    throw Error(Errc::dimension_mismatch, "prediction and relevance lengths differ");
  }
  for (double r : relevance) {
    if (!(r >= 0.0)) throw Error(Errc::validation, "relevance must be non-negative");
  }
  const std::size_t n = pred.size();
  const std::size_t depth = std::min(k, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pred[a] > pred[b]; });
  std::vector<double> ideal(relevance.begin(), relevance.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());

  double dcg = 0.0;
  double idcg = 0.0;
  for (std::size_t i = 0; i < depth; ++i) {
    const double discount = std::log2(static_cast<double>(i) + 2.0);
    dcg += relevance[order[i]] / discount;
    idcg += ideal[i] / discount;
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

/// label[i] = 1 iff snapshot i+1 has strictly more edges than snapshot i.
inline std::vector<int> growth_labels(std::span<const std::size_t> counts) {
  std::vector<int> labels;
  for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
    labels.push_back(counts[i + 1] > counts[i] ? 1 : 0);
  }
  return labels;
}

struct LabelRecord {
  Timestamp t = 0;
  NodeId node = 0;
  std::vector<double> value;
};

/// Time-stamped per-node target vectors of one fixed width.
class LabelStream {
 public:
  explicit LabelStream(std::size_t dim) : dim_(dim) {}

  LabelStream(std::size_t dim, std::span<const LabelRecord> records) : dim_(dim) {
    for (const auto& r : records) add(r);
  }

  void add(const LabelRecord& record) {
    if (record.value.size() != dim_) {
      throw Error(Errc::dimension_mismatch, "label width " + std::to_string(record.value.size()) +
                                                " != " + std::to_string(dim_));
    }
    if (record.node < 0) throw Error(Errc::validation, "negative node id");
    const auto i = static_cast<std::size_t>(record.node);
    if (i >= per_node_.size()) per_node_.resize(i + 1);
    auto& list = per_node_[i];
    // keep each node's list sorted by time; equal times keep arrival order
    const auto pos = std::upper_bound(
        list.begin(), list.end(), record.t,
        [](Timestamp t, const Entry& e) { return t < e.t; });
    list.insert(pos, Entry{record.t, record.value});
  }

  std::size_t dim() const { return dim_; }

  /// Most recent label of `node` strictly before `t`, if any.
  const std::vector<double>* latest_before(NodeId node, Timestamp t) const {
    const auto i = static_cast<std::size_t>(node);
    if (node < 0 || i >= per_node_.size()) return nullptr;
    const auto& list = per_node_[i];
    const auto it = std::lower_bound(list.begin(), list.end(), t,
                                     [](const Entry& e, Timestamp v) { return e.t < v; });
    if (it == list.begin()) return nullptr;
    return &std::prev(it)->value;
  }

 private:
  struct Entry {
    Timestamp t;
    std::vector<double> value;
  };
  std::size_t dim_;
  std::vector<std::vector<Entry>> per_node_;
};

/// Predicts the node's last label before `t`; the zero vector when unseen.
inline std::vector<double> persistent_forecast(const LabelStream& history, NodeId node,
                                               Timestamp t) {
  if (const auto* v = history.latest_before(node, t)) return *v;
  return std::vector<double>(history.dim(), 0.0);
}

/// Mean NDCG@k of persistent forecasts over `targets`, using `history` for
/// the forecasts.
inline double persistent_forecast_ndcg(const LabelStream& history,
                                       std::span<const LabelRecord> targets, std::size_t k) {
  if (targets.empty()) return 0.0;
  double total = 0.0;
  for (const auto& target : targets) {
    const auto pred = persistent_forecast(history, target.node, target.t);
    total += ndcg_at_k(pred, target.value, k);
  }
  return total / static_cast<double>(targets.size());
}

struct LinkEvalResult {
  double mean_mrr = 0.0;
  std::size_t num_queries = 0;
};

/// Streams the view's edges in batches of `batch_size` events and scores each
/// positive against its negatives. Memory only ever holds edges strictly
/// earlier than the batch being scored: each batch's edges are committed once
/// a later timestamp starts, so a timestamp split across batches never leaks.
/// On return the memory holds every edge of the view.
/// `negatives` holds one list per edge of the view, in stored order.
inline LinkEvalResult edgebank_replay(EdgeBankMemory& memory, const GraphView& view,
                                      const NegativeSet& negatives, std::size_t batch_size) {
  if (negatives.size() != view.num_edges()) {
    throw Error(Errc::dimension_mismatch,
                std::to_string(negatives.size()) + " negative lists for " +
                    std::to_string(view.num_edges()) + " edges");
  }
  const auto& edges = view.storage().edges();
  const std::size_t first = view.events().edge_begin;
  std::size_t committed = first;
  auto commit_until = [&](std::size_t row) {
    if (row <= committed) return;
    memory.update(std::span<const NodeId>(edges.src).subspan(committed, row - committed),
                  std::span<const NodeId>(edges.dst).subspan(committed, row - committed));
    committed = row;
  };

  LinkEvalResult result;
  double total = 0.0;
  std::vector<double> neg_scores;
  for (const auto& batch : iterate_by_events(view, batch_size)) {
    if (batch.num_edges() == 0) continue;
    commit_until(view.storage().lower_bound(batch.edge_time().front()));
    const auto src = batch.src();
    const auto dst = batch.dst();
    for (std::size_t i = 0; i < src.size(); ++i) {
      const auto& list = negatives.lists[batch.edge_begin + i - first];
      neg_scores.clear();
      for (auto n : list) neg_scores.push_back(memory.contains(src[i], n) ? 1.0 : 0.0);
      total += mrr(memory.contains(src[i], dst[i]) ? 1.0 : 0.0, neg_scores);
      ++result.num_queries;
    }
  }
  commit_until(view.events().edge_end);
  result.mean_mrr = result.num_queries ? total / static_cast<double>(result.num_queries) : 0.0;
  return result;
}

}  // namespace tgraph
