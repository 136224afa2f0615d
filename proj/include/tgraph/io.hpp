#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tgraph/error.hpp"
#include "tgraph/eval.hpp"
#include "tgraph/granularity.hpp"
#include "tgraph/graph.hpp"
#include "tgraph/view.hpp"

namespace tgraph::io {

namespace fs = std::filesystem;

/// Declarative description of a CSV dataset. Relative paths are resolved
/// against the manifest's directory.
struct Manifest {
  fs::path edges;
  std::optional<fs::path> node_events;
  std::optional<fs::path> static_features;
  std::optional<fs::path> negatives;
  TimeGranularity granularity = TimeGranularity::second;
  std::string src_col = "src";
  std::string dst_col = "dst";
  std::string t_col = "t";
  std::string node_col = "node";
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline void split_fields(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Integral timestamps; "36.0" is accepted, "36.5" is not.
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
  Timestamp v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  const auto d = parse_double(s);
  if (!d || !std::isfinite(*d) || std::floor(*d) != *d || std::fabs(*d) > 9.0e18) {
    return std::nullopt;
  }
  return static_cast<Timestamp>(*d);
}

inline std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open '" + path.string() + "'");
  return in;
}

inline std::string fmt_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Header of a CSV table with required columns located and the rest treated
// as numeric features in file order.
struct TableLayout {
  std::vector<std::size_t> required;  // index per requested name
  std::vector<std::size_t> features;
  std::vector<std::string> feature_names;
  std::size_t width = 0;
};

inline TableLayout read_header(std::istream& in, const fs::path& path,
                               const std::vector<std::string>& required) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::schema, "'" + path.string() + "' has no header");
  std::vector<std::string_view> fields;
  split_fields(line, fields);
  TableLayout layout;
  layout.width = fields.size();
  for (const auto& name : required) {
    const auto it = std::find(fields.begin(), fields.end(), name);
    if (it == fields.end()) {
      throw Error(Errc::schema, "'" + path.string() + "' lacks column '" + name + "'");
    }
    layout.required.push_back(static_cast<std::size_t>(it - fields.begin()));
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (std::find(layout.required.begin(), layout.required.end(), i) == layout.required.end()) {
      layout.features.push_back(i);
      layout.feature_names.emplace_back(fields[i]);
    }
  }
  return layout;
}

[[noreturn]] inline void row_error(const fs::path& path, std::size_t line, const std::string& what) {
  throw Error(Errc::parse, path.filename().string() + ":" + std::to_string(line) + ": " + what);
}

// Calls `row(fields, line_number)` for every non-blank data row.
template <typename Row>
void for_each_row(std::istream& in, const fs::path& path, const TableLayout& layout, Row row) {
  std::string line;
  std::vector<std::string_view> fields;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    split_fields(line, fields);
    if (fields.size() != layout.width) {
      row_error(path, line_no,
                "expected " + std::to_string(layout.width) + " fields, got " +
                    std::to_string(fields.size()));
    }
    row(fields, line_no);
  }
}

inline void append_features(const std::vector<std::string_view>& fields, const TableLayout& layout,
                            const fs::path& path, std::size_t line_no, std::vector<double>& out) {
  for (auto c : layout.features) {
    const auto v = parse_double(fields[c]);
    if (!v) row_error(path, line_no, "unparsable feature '" + std::string(fields[c]) + "'");
    out.push_back(*v);
  }
}

}  // namespace detail

inline Manifest parse_manifest_text(std::string_view text, const fs::path& base_dir) {
  Manifest m;
  bool have_edges = false;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  auto resolve = [&](std::string_view v) {
    fs::path p{std::string(v)};
    return p.is_absolute() ? p : base_dir / p;
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::schema, "manifest line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = detail::trim(body.substr(0, eq));
    const auto value = detail::trim(body.substr(eq + 1));
    if (key == "edges") {
      m.edges = resolve(value);
      have_edges = true;
    } else if (key == "node_events") {
      m.node_events = resolve(value);
    } else if (key == "static_features") {
      m.static_features = resolve(value);
    } else if (key == "negatives") {
      m.negatives = resolve(value);
    } else if (key == "granularity") {
      const auto g = parse_granularity(value);
      if (!g) throw Error(Errc::schema, "unknown granularity '" + std::string(value) + "'");
      m.granularity = *g;
    } else if (key == "src_col") {
      m.src_col = value;
    } else if (key == "dst_col") {
      m.dst_col = value;
    } else if (key == "t_col") {
      m.t_col = value;
    } else {
      throw Error(Errc::schema, "unknown manifest key '" + std::string(key) + "'");
    }
  }
  if (!have_edges) throw Error(Errc::schema, "manifest has no 'edges' entry");
  return m;
}

inline Manifest parse_manifest(const fs::path& path) {
  auto in = detail::open_input(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_manifest_text(buffer.str(), path.parent_path());
}

/// String label <-> dense id, ids assigned in first-appearance order.
class IdMap {
 public:
  NodeId intern(std::string_view label) {
    const auto [it, inserted] = ids_.try_emplace(std::string(label), static_cast<NodeId>(labels_.size()));
    if (inserted) labels_.emplace_back(label);
    return it->second;
  }

  std::optional<NodeId> find(std::string_view label) const {
    const auto it = ids_.find(std::string(label));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& label(NodeId id) const { return labels_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return labels_.size(); }

 private:
  std::unordered_map<std::string, NodeId> ids_;
  std::vector<std::string> labels_;
};

struct Dataset {
  GraphPtr graph;
  IdMap ids;
  Manifest manifest;
  std::vector<std::string> edge_feature_names;
  std::vector<std::string> node_feature_names;
};

inline Dataset load_csv(const Manifest& manifest) {
  Dataset ds;
  ds.manifest = manifest;

  EdgeColumns edges;
  {
    auto in = detail::open_input(manifest.edges);
    const auto layout =
        detail::read_header(in, manifest.edges, {manifest.src_col, manifest.dst_col, manifest.t_col});
    edges.feat_dim = layout.features.size();
    ds.edge_feature_names = layout.feature_names;
    detail::for_each_row(in, manifest.edges, layout, [&](const auto& f, std::size_t line) {
      const auto t = detail::parse_timestamp(f[layout.required[2]]);
      if (!t) {
        detail::row_error(manifest.edges, line,
                          "unparsable timestamp '" + std::string(f[layout.required[2]]) + "'");
      }
      edges.src.push_back(ds.ids.intern(f[layout.required[0]]));
      edges.dst.push_back(ds.ids.intern(f[layout.required[1]]));
      edges.t.push_back(*t);
      detail::append_features(f, layout, manifest.edges, line, edges.feat);
    });
  }

  NodeEventColumns nodes;
  if (manifest.node_events) {
    const auto& path = *manifest.node_events;
    auto in = detail::open_input(path);
    const auto layout = detail::read_header(in, path, {manifest.node_col, manifest.t_col});
    nodes.feat_dim = layout.features.size();
    ds.node_feature_names = layout.feature_names;
    detail::for_each_row(in, path, layout, [&](const auto& f, std::size_t line) {
      const auto t = detail::parse_timestamp(f[layout.required[1]]);
      if (!t) {
        detail::row_error(path, line,
                          "unparsable timestamp '" + std::string(f[layout.required[1]]) + "'");
      }
      nodes.node.push_back(ds.ids.intern(f[layout.required[0]]));
      nodes.t.push_back(*t);
      detail::append_features(f, layout, path, line, nodes.feat);
    });
  }

  std::optional<StaticNodeFeatures> static_feats;
  if (manifest.static_features) {
    const auto& path = *manifest.static_features;
    auto in = detail::open_input(path);
    const auto layout = detail::read_header(in, path, {manifest.node_col});
    StaticNodeFeatures sf;
    sf.rows = ds.ids.size();
    sf.cols = layout.features.size();
    sf.data.assign(sf.rows * sf.cols, 0.0);
    std::vector<char> seen(sf.rows, 0);
    std::vector<double> row;
    detail::for_each_row(in, path, layout, [&](const auto& f, std::size_t line) {
      const auto id = ds.ids.find(f[layout.required[0]]);
      if (!id) detail::row_error(path, line, "unknown node '" + std::string(f[layout.required[0]]) + "'");
      const auto i = static_cast<std::size_t>(*id);
      if (seen[i]) detail::row_error(path, line, "duplicate node '" + std::string(f[layout.required[0]]) + "'");
      seen[i] = 1;
      row.clear();
      detail::append_features(f, layout, path, line, row);
      std::copy(row.begin(), row.end(), sf.data.begin() + static_cast<std::ptrdiff_t>(i * sf.cols));
    });
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
      throw Error(Errc::schema, "'" + path.string() + "' does not cover every node");
    }
    static_feats = std::move(sf);
  }

  ds.graph = TemporalGraph::from_columns(std::move(edges), std::move(nodes), manifest.granularity,
                                         std::move(static_feats));
  return ds;
}

inline Dataset load_csv(const fs::path& manifest_path) {
  return load_csv(parse_manifest(manifest_path));
}

struct CsvNames {
  std::string src = "src";
  std::string dst = "dst";
  std::string t = "t";
  std::vector<std::string> features;  // generated as f0, f1, ... when empty
};

/// Writes the edges of rows [begin, end) with labels from `ids`.
inline void write_edges_csv(std::ostream& out, const TemporalGraph& graph, const IdMap& ids,
                            const CsvNames& names, std::size_t begin, std::size_t end) {
  const auto& e = graph.edges();
  out << names.src << ',' << names.dst << ',' << names.t;
  for (std::size_t c = 0; c < e.feat_dim; ++c) {
    out << ',' << (c < names.features.size() ? names.features[c] : "f" + std::to_string(c));
  }
  out << '\n';
  for (std::size_t i = begin; i < end; ++i) {
    out << ids.label(e.src[i]) << ',' << ids.label(e.dst[i]) << ',' << e.t[i];
    for (double v : e.feat_row(i)) out << ',' << detail::fmt_double(v);
    out << '\n';
  }
}

inline void write_edges_csv(const fs::path& path, const TemporalGraph& graph, const IdMap& ids,
                            const CsvNames& names, std::size_t begin, std::size_t end) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io, "cannot write '" + path.string() + "'");
  write_edges_csv(out, graph, ids, names, begin, end);
  if (!out) throw Error(Errc::io, "failed writing '" + path.string() + "'");
}

inline void write_node_events_csv(std::ostream& out, const TemporalGraph& graph, const IdMap& ids,
                                  const std::string& node_col, const std::string& t_col,
                                  const std::vector<std::string>& feature_names) {
  const auto& n = graph.node_events();
  out << node_col << ',' << t_col;
  for (std::size_t c = 0; c < n.feat_dim; ++c) {
    out << ',' << (c < feature_names.size() ? feature_names[c] : "f" + std::to_string(c));
  }
  out << '\n';
  for (std::size_t i = 0; i < n.size(); ++i) {
    out << ids.label(n.node[i]) << ',' << n.t[i];
    for (double v : n.feat_row(i)) out << ',' << detail::fmt_double(v);
    out << '\n';
  }
}

inline CsvNames csv_names(const Dataset& ds) {
  return {ds.manifest.src_col, ds.manifest.dst_col, ds.manifest.t_col, ds.edge_feature_names};
}

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

inline std::optional<SplitRatios> parse_ratios(std::string_view text) {
  std::vector<std::string_view> parts;
  detail::split_fields(text, parts);
  if (parts.size() != 3) return std::nullopt;
  SplitRatios r;
  const auto a = detail::parse_double(parts[0]);
  const auto b = detail::parse_double(parts[1]);
  const auto c = detail::parse_double(parts[2]);
  if (!a || !b || !c) return std::nullopt;
  r.train = *a;
  r.val = *b;
  r.test = *c;
  return r;
}

struct Split {
  GraphView train;
  GraphView val;
  GraphView test;
  Timestamp val_start = 0;
  Timestamp test_start = 0;
};

/// Chronological train/val/test views. Boundaries start at floor(ratio *
/// num_edges) and move forward past any timestamp that would otherwise
/// straddle two splits.
inline Split chronological_split(const GraphPtr& graph, const SplitRatios& ratios) {
  for (double r : {ratios.train, ratios.val, ratios.test}) {
    if (!(r > 0.0)) throw Error(Errc::validation, "split ratios must be positive");
  }
  if (std::fabs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw Error(Errc::validation, "split ratios must sum to 1");
  }
  const auto& t = graph->edges().t;
  const std::size_t n = t.size();
  if (n == 0) throw Error(Errc::degenerate_split, "graph has no edges to split");

  auto snap = [&](std::size_t idx) {
    if (idx == 0 || idx >= n || t[idx - 1] != t[idx]) return idx;
    return static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), t[idx]) - t.begin());
  };
  // the tolerance keeps 0.7 * 100 at 70 despite binary rounding
  auto target = [&](double r) {
    return static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 1e-9));
  };
  const auto val_row = snap(target(ratios.train));
  const auto test_row = snap(std::max(val_row, target(ratios.train + ratios.val)));
  if (val_row == 0 || val_row >= test_row || test_row >= n) {
    throw Error(Errc::degenerate_split,
                "split sizes " + std::to_string(val_row) + "/" +
                    std::to_string(test_row - std::min(test_row, val_row)) + "/" +
                    std::to_string(n - std::min(n, test_row)) + " leave a split empty");
  }
  const GraphView full(graph);
  const auto whole = full.interval();
  const Timestamp val_start = t[val_row];
  const Timestamp test_start = t[test_row];
  return {slice_view(full, whole.start, val_start), slice_view(full, val_start, test_start),
          slice_view(full, test_start, whole.end), val_start, test_start};
}

/// One list of node labels per line, whitespace separated, mapped through
/// `ids`. Unknown labels are an error.
inline NegativeSet read_negatives(const fs::path& path, const IdMap& ids) {
  auto in = detail::open_input(path);
  NegativeSet out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<NodeId> list;
    std::string label;
    while (fields >> label) {
      const auto id = ids.find(label);
      if (!id) detail::row_error(path, line_no, "unknown node '" + label + "'");
      list.push_back(*id);
    }
    out.lists.push_back(std::move(list));
  }
  return out;
}

/// Label table: `node` and `t` columns, every other column one label dimension.
inline std::vector<LabelRecord> read_labels_csv(const fs::path& path, IdMap& ids,
                                                const std::string& node_col = "node",
                                                const std::string& t_col = "t") {
  auto in = detail::open_input(path);
  const auto layout = detail::read_header(in, path, {node_col, t_col});
  std::vector<LabelRecord> out;
  detail::for_each_row(in, path, layout, [&](const auto& f, std::size_t line) {
    LabelRecord r;
    const auto t = detail::parse_timestamp(f[layout.required[1]]);
    if (!t) detail::row_error(path, line, "unparsable timestamp '" + std::string(f[layout.required[1]]) + "'");
    r.t = *t;
    r.node = ids.intern(f[layout.required[0]]);
    detail::append_features(f, layout, path, line, r.value);
    out.push_back(std::move(r));
  });
  return out;
}

}  // namespace tgraph::io
