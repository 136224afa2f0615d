#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tgraph/reference/naive_discretize.hpp"
#include "tgraph/synthetic.hpp"
#include "tgraph/tgraph.hpp"

namespace fs = std::filesystem;
using namespace tgraph;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Lines starting with "# time:" carry wall-clock measurements and are the
// only nondeterministic output.
void print_time(const char* what, double ms) { std::printf("# time: %s %.3f ms\n", what, ms); }

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

TimeGranularity granularity_arg(const std::string& name) {
  const auto g = parse_granularity(name);
  if (!g) throw CLI::ValidationError("--granularity", "unknown granularity '" + name + "'");
  return *g;
}

ReductionOp reduction_arg(const std::string& name) {
  const auto op = parse_reduction(name);
  if (!op) throw CLI::ValidationError("--reduce", "unknown reduction '" + name + "'");
  return *op;
}

io::SplitRatios ratios_arg(const std::string& text) {
  const auto r = io::parse_ratios(text);
  if (!r) throw CLI::ValidationError("--ratios", "expected three comma-separated numbers");
  return *r;
}

std::size_t count_buckets(const TemporalGraph& g) {
  std::vector<Timestamp> steps = g.edges().t;
  steps.insert(steps.end(), g.node_events().t.begin(), g.node_events().t.end());
  std::sort(steps.begin(), steps.end());
  return static_cast<std::size_t>(std::unique(steps.begin(), steps.end()) - steps.begin());
}

std::vector<NodeId> destinations(const TemporalGraph& g) {
  std::vector<NodeId> out = g.edges().dst;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<PositiveEdge> positives_of(const GraphView& view) {
  const auto& e = view.events();
  std::vector<PositiveEdge> out;
  out.reserve(e.num_edges());
  for (std::size_t i = 0; i < e.num_edges(); ++i) {
    out.push_back({e.src()[i], e.dst()[i], e.edge_time()[i]});
  }
  return out;
}

void run_stats(const fs::path& manifest, const std::string& ratios) {
  const auto ds = io::load_csv(manifest);
  const auto split = io::chronological_split(ds.graph, ratios_arg(ratios));
  const auto stats = graph_stats(*ds.graph, split.test_start);
  std::printf("nodes: %zu\n", stats.num_nodes);
  std::printf("edges: %zu\n", stats.num_edges);
  std::printf("node events: %zu\n", stats.num_node_events);
  std::printf("unique edges: %zu\n", stats.num_unique_edges);
  std::printf("unique steps: %zu\n", stats.num_unique_steps);
  std::printf("surprise: %s\n", fixed(*stats.surprise).c_str());
}

void run_discretize(const fs::path& manifest, const std::string& granularity,
                    const std::string& reduce, const fs::path& out) {
  const auto g = granularity_arg(granularity);
  const auto op = reduction_arg(reduce);
  const auto ds = io::load_csv(manifest);
  const auto start = Clock::now();
  const auto coarse = discretize(*ds.graph, g, op);
  const double ms = elapsed_ms(start);

  auto names = io::csv_names(ds);
  auto node_names = ds.node_feature_names;
  if (op == ReductionOp::count) {
    names.features = {"count"};
    node_names = {"count"};
  }
  io::write_edges_csv(out, *coarse, ds.ids, names, 0, coarse->num_edges());
  if (coarse->num_node_events() > 0) {
    const fs::path nodes_out = out.string() + ".node_events.csv";
    std::ofstream nout(nodes_out);
    if (!nout) throw Error(Errc::io, "cannot write '" + nodes_out.string() + "'");
    io::write_node_events_csv(nout, *coarse, ds.ids, ds.manifest.node_col, ds.manifest.t_col,
                              node_names);
  }
  std::printf("buckets: %zu\n", count_buckets(*coarse));
  std::printf("edges: %zu\n", coarse->num_edges());
  std::printf("node events: %zu\n", coarse->num_node_events());
  print_time("discretize", ms);
}

void run_split(const fs::path& manifest, const std::string& ratios, const fs::path& out_dir) {
  const auto ds = io::load_csv(manifest);
  const auto split = io::chronological_split(ds.graph, ratios_arg(ratios));
  fs::create_directories(out_dir);
  const auto names = io::csv_names(ds);
  const std::pair<const char*, const GraphView*> parts[] = {
      {"train", &split.train}, {"val", &split.val}, {"test", &split.test}};
  for (const auto& [name, view] : parts) {
    const auto& e = view->events();
    io::write_edges_csv(out_dir / (std::string(name) + ".csv"), *ds.graph, ds.ids, names,
                        e.edge_begin, e.edge_end);
    std::printf("%s: %zu\n", name, e.num_edges());
  }
  std::printf("val start: %lld\n", static_cast<long long>(split.val_start));
  std::printf("test start: %lld\n", static_cast<long long>(split.test_start));
}

struct EdgeBankArgs {
  std::string ratios = "0.70,0.15,0.15";
  std::optional<fs::path> negatives;
  std::size_t uniform = 100;
  std::uint64_t seed = 0;
  std::size_t batch_size = 200;
};

void run_edgebank(const fs::path& manifest, const EdgeBankArgs& args) {
  const auto ds = io::load_csv(manifest);
  const auto split = io::chronological_split(ds.graph, ratios_arg(args.ratios));
  const auto universe = destinations(*ds.graph);

  const auto val_pos = positives_of(split.val);
  const auto test_pos = positives_of(split.test);
  // validation always draws uniform negatives, at most all other destinations
  const std::size_t val_q = std::min(args.uniform, universe.size() - 1);
  const auto val_neg = sample_uniform_negatives(detail::mix_seed(args.seed, 1), val_pos, universe, val_q);
  NegativeSet test_neg;
  auto negatives_path = args.negatives;
  if (!negatives_path && ds.manifest.negatives) negatives_path = ds.manifest.negatives;
  if (negatives_path) {
    test_neg = io::read_negatives(*negatives_path, ds.ids);
  } else {
    test_neg = sample_uniform_negatives(detail::mix_seed(args.seed, 2), test_pos, universe, args.uniform);
  }
  check_negatives(test_neg, test_pos);

  const auto start = Clock::now();
  EdgeBankMemory memory;
  memory.update(split.train.events());
  const auto val = edgebank_replay(memory, split.val, val_neg, args.batch_size);
  const auto test = edgebank_replay(memory, split.test, test_neg, args.batch_size);
  const double ms = elapsed_ms(start);

  std::printf("validation queries: %zu\n", val.num_queries);
  std::printf("validation mrr: %s\n", fixed(val.mean_mrr).c_str());
  std::printf("test queries: %zu\n", test.num_queries);
  std::printf("test mrr: %s\n", fixed(test.mean_mrr).c_str());
  print_time("edgebank", ms);
}

void run_growth_labels(const fs::path& manifest, const std::string& granularity) {
  const auto g = granularity_arg(granularity);
  const auto ds = io::load_csv(manifest);
  std::vector<std::size_t> counts;
  for (const auto& batch : iterate_by_time(GraphView(ds.graph), g)) counts.push_back(batch.num_edges());
  const auto labels = growth_labels(counts);
  std::printf("snapshots: %zu\n", counts.size());
  std::printf("counts:");
  for (auto c : counts) std::printf(" %zu", c);
  std::printf("\nlabels:");
  for (auto l : labels) std::printf(" %d", l);
  std::printf("\n");
}

struct BenchArgs {
  std::optional<fs::path> manifest;
  std::size_t synthetic = 0;
  std::uint64_t seed = 0;
  std::string granularity = "hour";
  std::string reduce = "last";
  std::size_t repeat = 3;
};

void run_bench(const BenchArgs& args) {
  const auto g = granularity_arg(args.granularity);
  const auto op = reduction_arg(args.reduce);
  GraphPtr graph;
  if (args.manifest) {
    graph = io::load_csv(*args.manifest).graph;
  } else {
    SyntheticSpec spec;
    spec.num_edges = args.synthetic;
    spec.seed = args.seed;
    graph = synthetic_stream(spec);
  }
  // best of `repeat` runs for each path
  GraphPtr fast;
  GraphPtr slow;
  double engine_ms = 0.0;
  double naive_ms = 0.0;
  for (std::size_t r = 0; r < args.repeat; ++r) {
    auto start = Clock::now();
    fast = discretize(*graph, g, op);
    const double e = elapsed_ms(start);
    start = Clock::now();
    slow = reference::naive_discretize(*graph, g, op);
    const double n = elapsed_ms(start);
    engine_ms = r == 0 ? e : std::min(engine_ms, e);
    naive_ms = r == 0 ? n : std::min(naive_ms, n);
  }

  std::printf("events: %zu\n", graph->num_events());
  std::printf("output events: %zu\n", fast->num_events());
  std::printf("outputs match: %s\n",
              fast->edges() == slow->edges() && fast->node_events() == slow->node_events() ? "yes"
                                                                                         : "no");
  print_time("engine", engine_ms);
  print_time("naive", naive_ms);
  std::printf("# time: speedup %.2fx\n", naive_ms / std::max(engine_ms, 1e-6));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal graph toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  fs::path manifest;
  std::string ratios = "0.70,0.15,0.15";
  std::string granularity;
  std::string reduce = "last";
  fs::path out;

  auto* stats = app.add_subcommand("stats", "Print dataset statistics");
  stats->add_option("manifest", manifest, "Dataset manifest")->required();
  stats->add_option("--split", ratios, "Train,val,test ratios used for surprise");

  auto* disc = app.add_subcommand("discretize", "Collapse events onto a coarser granularity");
  disc->add_option("manifest", manifest, "Dataset manifest")->required();
  disc->add_option("--granularity", granularity, "Target granularity")->required();
  disc->add_option("--reduce", reduce, "first|last|sum|mean|max|count");
  disc->add_option("--out", out, "Output edge CSV")->required();

  fs::path out_dir;
  auto* split = app.add_subcommand("split", "Write chronological train/val/test CSVs");
  split->add_option("manifest", manifest, "Dataset manifest")->required();
  split->add_option("--ratios", ratios, "Train,val,test ratios");
  split->add_option("--out-dir", out_dir, "Output directory")->required();

  EdgeBankArgs eb;
  auto* edgebank = app.add_subcommand("edgebank", "Evaluate the EdgeBank baseline");
  edgebank->add_option("manifest", manifest, "Dataset manifest")->required();
  edgebank->add_option("--ratios", eb.ratios, "Train,val,test ratios");
  auto* neg_opt = edgebank->add_option("--negatives", eb.negatives,
                                       "Negatives file for the test positives");
  auto* uni_opt = edgebank->add_option("--uniform-negatives", eb.uniform,
                                       "Uniform negatives per positive");
  neg_opt->excludes(uni_opt);
  edgebank->add_option("--seed", eb.seed, "Negative sampling seed");
  edgebank->add_option("--batch-size", eb.batch_size, "Events per batch")
      ->check(CLI::PositiveNumber);

  auto* growth = app.add_subcommand("growth-labels", "Per-snapshot edge counts and growth labels");
  growth->add_option("manifest", manifest, "Dataset manifest")->required();
  growth->add_option("--granularity", granularity, "Snapshot granularity")->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench-discretize", "Time the engine against the naive path");
  auto* bench_manifest = bench_cmd->add_option("manifest", bench.manifest, "Dataset manifest");
  auto* bench_synth = bench_cmd->add_option("--synthetic", bench.synthetic,
                                            "Generate this many synthetic edges instead")
                          ->check(CLI::PositiveNumber);
  bench_manifest->excludes(bench_synth);
  bench_cmd->add_option("--seed", bench.seed, "Synthetic stream seed");
  bench_cmd->add_option("--granularity", bench.granularity, "Target granularity");
  bench_cmd->add_option("--reduce", bench.reduce, "first|last|sum|mean|max|count");
  bench_cmd->add_option("--repeat", bench.repeat, "Runs per path; the fastest is reported")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
    if (bench_cmd->parsed() && !bench.manifest && bench.synthetic == 0) {
      throw CLI::RequiredError("a manifest or --synthetic");
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (stats->parsed()) run_stats(manifest, ratios);
    if (disc->parsed()) run_discretize(manifest, granularity, reduce, out);
    if (split->parsed()) run_split(manifest, ratios, out_dir);
    if (edgebank->parsed()) run_edgebank(manifest, eb);
    if (growth->parsed()) run_growth_labels(manifest, granularity);
    if (bench_cmd->parsed()) run_bench(bench);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
