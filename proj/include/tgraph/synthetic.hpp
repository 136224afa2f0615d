#pragma once

// Seeded synthetic interaction streams for benchmarks.

#include <cstdint>
#include <random>

#include "tgraph/graph.hpp"

namespace tgraph {

struct SyntheticSpec {
  std::size_t num_edges = 1'293'103;
  NodeId num_sources = 1000;
  NodeId num_targets = 1000;
  Timestamp duration = 4 * 365 * 86400;  // native ticks
  std::size_t edge_dim = 1;
  TimeGranularity granularity = TimeGranularity::second;
  std::uint64_t seed = 0;
};

/// Bipartite stream: sources 0..S-1 interact with targets S..S+T-1 at
/// uniformly drawn times, with Zipf-like skew on the targets.
inline GraphPtr synthetic_stream(const SyntheticSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<Timestamp> time(0, spec.duration);
  std::uniform_int_distribution<NodeId> source(0, spec.num_sources - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EdgeColumns e;
  e.feat_dim = spec.edge_dim;
  e.t.resize(spec.num_edges);
  e.src.resize(spec.num_edges);
  e.dst.resize(spec.num_edges);
  e.feat.resize(spec.num_edges * spec.edge_dim);
  for (std::size_t i = 0; i < spec.num_edges; ++i) {
    e.t[i] = time(rng);
    e.src[i] = source(rng);
    const double u = unit(rng);
    e.dst[i] = spec.num_sources + static_cast<NodeId>(u * u * static_cast<double>(spec.num_targets));
    for (std::size_t c = 0; c < spec.edge_dim; ++c) e.feat[i * spec.edge_dim + c] = unit(rng);
  }
  return TemporalGraph::from_columns(std::move(e), {}, spec.granularity);
}

}  // namespace tgraph
