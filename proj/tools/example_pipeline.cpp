// Library walkthrough: build a stream, coarsen it, split it and run a hook
// recipe over daily batches.

#include <cstdio>
#include <memory>

#include "tgraph/tgraph.hpp"

int main() {
  using namespace tgraph;

  const auto fine = synthetic_stream({.num_edges = 50'000,
                                      .num_sources = 200,
                                      .num_targets = 200,
                                      .duration = 90 * 86400,
                                      .seed = 7});
  const auto hourly = discretize(*fine, TimeGranularity::hour, ReductionOp::mean);
  std::printf("events: %zu -> %zu after hourly mean\n", fine->num_edges(), hourly->num_edges());

  const auto split = io::chronological_split(hourly, {0.70, 0.15, 0.15});

  HookManager manager;
  manager.register_hook("train", std::make_shared<NegativeSamplerHook>(hourly->node_id_bound(), 20, 1));
  manager.register_hook("train", std::make_shared<RecencySamplerHook>(32, 10));
  manager.register_hook("train", std::make_shared<EdgeBankHook>());
  for (const auto& name : manager.recipe("train").ordered_names()) std::printf("hook: %s\n", name.c_str());

  const DataLoader loader(split.train, ByTime{TimeGranularity::day}, manager, "train");
  double total = 0.0;
  std::size_t queries = 0;
  for (const auto& batch : loader) {
    const auto& scores = batch.at(attr::scores);
    const std::size_t width = scores.shape[1];
    const auto& s = scores.as_reals();
    for (std::size_t i = 0; i < scores.shape[0]; ++i) {
      const std::span<const double> row(s.data() + i * width, width);
      total += mrr(row[0], row.subspan(1));
      ++queries;
    }
  }
  std::printf("daily batches: %zu\n", loader.size());
  std::printf("edgebank training mrr: %.4f over %zu queries\n", queries ? total / double(queries) : 0.0,
              queries);
}
