// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nsm/graph.hpp"

namespace nsm {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw FormatError("missing file: " + p.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

inline long long parse_int(const std::string& s, const char* what) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw FormatError(std::string("bad integer in ") + what + ": '" + s + "'");
  }
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  if (pos != s.size())
    throw FormatError(std::string("trailing junk in ") + what + ": '" + s + "'");
  return v;
}

}  // namespace detail

struct TuLoadOptions {
  // Connected components smaller than this are dropped after splitting.
  int min_component_size = 3;
};

// Loads a TUDataset-format corpus: <name>_A.txt holds 1-indexed "i, j" edge
// lines, <name>_graph_indicator.txt one 1-based graph id per node line,
// <name>_node_labels.txt one integer label per node line. Disconnected raw
// graphs are split into components; labels are densified to 0..|alphabet|-1
// in ascending raw-label order.
inline GraphDataset load_tu_dataset(const std::filesystem::path& dir, const std::string& name,
                                    const TuLoadOptions& opts = {}) {
  const auto a_lines = detail::read_lines(dir / (name + "_A.txt"));
  const auto ind_lines = detail::read_lines(dir / (name + "_graph_indicator.txt"));
  const auto lab_lines = detail::read_lines(dir / (name + "_node_labels.txt"));

  const int total_nodes = static_cast<int>(ind_lines.size());
  if (static_cast<int>(lab_lines.size()) != total_nodes)
    throw FormatError("node label count does not match graph indicator count");

  std::vector<int> graph_of(total_nodes);
  int num_graphs = 0;
  for (int i = 0; i < total_nodes; ++i) {
    long long gid = detail::parse_int(ind_lines[i], "graph indicator");
    if (gid < 1 || gid < num_graphs || gid > num_graphs + 1)
      throw FormatError("graph indicator ids must be contiguous and non-decreasing");
    num_graphs = static_cast<int>(std::max<long long>(num_graphs, gid));
    graph_of[i] = static_cast<int>(gid) - 1;
  }

  std::vector<long long> raw_labels(total_nodes);
  for (int i = 0; i < total_nodes; ++i)
    raw_labels[i] = detail::parse_int(lab_lines[i], "node labels");

  // Per-graph node ranges (nodes are grouped by the non-decreasing indicator).
  std::vector<int> first_node(num_graphs + 1, 0);
  for (int i = 0; i < total_nodes; ++i) first_node[graph_of[i] + 1] = i + 1;
  for (int gi = 0; gi < num_graphs; ++gi)
    if (first_node[gi + 1] <= first_node[gi])
      throw FormatError("graph indicator leaves a graph without nodes");

  std::vector<std::vector<std::pair<NodeId, NodeId>>> edges(num_graphs);
  for (const auto& line : a_lines) {
    auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("edge line missing comma: '" + line + "'");
    long long a = detail::parse_int(line.substr(0, comma), "edge file");
    std::string rest = line.substr(comma + 1);
    std::size_t start = rest.find_first_not_of(" \t");
    if (start == std::string::npos) throw FormatError("edge line missing endpoint: '" + line + "'");
    long long b = detail::parse_int(rest.substr(start), "edge file");
    if (a < 1 || b < 1 || a > total_nodes || b > total_nodes)
      throw FormatError("edge references out-of-range node: '" + line + "'");
    int u = static_cast<int>(a) - 1, v = static_cast<int>(b) - 1;
    if (graph_of[u] != graph_of[v]) throw FormatError("edge crosses graph boundary: '" + line + "'");
    int gi = graph_of[u];
    edges[gi].emplace_back(u - first_node[gi], v - first_node[gi]);
  }

  // Build raw graphs, split disconnected ones, drop undersized components.
  struct RawGraph {
    std::vector<long long> labels;
    LabeledGraph g;
  };
  std::vector<RawGraph> kept;
  for (int gi = 0; gi < num_graphs; ++gi) {
    const int n = first_node[gi + 1] - first_node[gi];
    std::vector<LabelId> dummy(n, 0);
    LabeledGraph whole;
    try {
      whole = LabeledGraph::from_edges(dummy, edges[gi]);
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("graph ") + std::to_string(gi + 1) + ": " + e.what());
    }
    for (const auto& comp : connected_components(whole)) {
      if (static_cast<int>(comp.size()) < opts.min_component_size) continue;
      RawGraph rg;
      rg.g = induced_subgraph(whole, comp);
      rg.labels.reserve(comp.size());
      for (NodeId v : comp) rg.labels.push_back(raw_labels[first_node[gi] + v]);
      kept.push_back(std::move(rg));
    }
  }
  if (kept.empty()) throw FormatError("dataset has no graphs after validation");

  std::map<long long, LabelId> dense;
  for (const auto& rg : kept)
    for (long long l : rg.labels) dense.emplace(l, 0);
  GraphDataset ds;
  ds.name = name;
  for (auto& [raw, id] : dense) {
    id = static_cast<LabelId>(ds.raw_label_of.size());
    ds.raw_label_of.push_back(raw);
  }
  ds.label_alphabet_size = static_cast<int>(ds.raw_label_of.size());

  for (auto& rg : kept) {
    std::vector<LabelId> labels(rg.labels.size());
    for (std::size_t i = 0; i < rg.labels.size(); ++i) labels[i] = dense.at(rg.labels[i]);
    ds.graphs.push_back(LabeledGraph::from_edges(std::move(labels), rg.g.edges()));
  }
  ds.validate();
  return ds;
}

// Reload a corpus under a caller-supplied raw-label alphabet so its dense ids
// line up with a sibling corpus (e.g. query files that do not contain every
// label the data corpus does). Unseen raw labels are a format error.
inline GraphDataset load_tu_dataset_with_alphabet(const std::filesystem::path& dir,
                                                  const std::string& name,
                                                  const std::vector<long long>& alphabet,
                                                  const TuLoadOptions& opts = {}) {
  GraphDataset raw = load_tu_dataset(dir, name, opts);
  std::map<long long, LabelId> dense;
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    dense[alphabet[i]] = static_cast<LabelId>(i);
  GraphDataset ds;
  ds.name = name;
  ds.raw_label_of = alphabet;
  ds.label_alphabet_size = static_cast<int>(alphabet.size());
  for (const auto& g : raw.graphs) {
    std::vector<LabelId> labels(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) {
      auto it = dense.find(raw.raw_label_of.at(g.label(v)));
      if (it == dense.end())
        throw FormatError("corpus " + name + " contains a label outside the given alphabet");
      labels[v] = it->second;
    }
    ds.graphs.push_back(LabeledGraph::from_edges(std::move(labels), g.edges()));
  }
  ds.validate();
  return ds;
}

// Rebuilds both corpora over the sorted union of their raw alphabets so dense
// label ids are comparable across them.
inline void unify_alphabets(GraphDataset& a, GraphDataset& b) {
  std::map<long long, LabelId> dense;
  for (long long l : a.raw_label_of) dense.emplace(l, 0);
  for (long long l : b.raw_label_of) dense.emplace(l, 0);
  std::vector<long long> alphabet;
  for (auto& [raw, id] : dense) {
    id = static_cast<LabelId>(alphabet.size());
    alphabet.push_back(raw);
  }
  for (GraphDataset* ds : {&a, &b}) {
    for (auto& g : ds->graphs) {
      std::vector<LabelId> labels(g.node_count());
      for (NodeId v = 0; v < g.node_count(); ++v) labels[v] = dense.at(ds->raw_label_of[g.label(v)]);
      g = LabeledGraph::from_edges(std::move(labels), g.edges());
    }
    ds->raw_label_of = alphabet;
    ds->label_alphabet_size = static_cast<int>(alphabet.size());
  }
}

// Writes the same three-file format load_tu_dataset reads. Raw label values
// are restored through raw_label_of so a write/reload round trip is identity.
inline void write_tu_dataset(const GraphDataset& ds, const std::filesystem::path& dir,
                             const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream a(dir / (name + "_A.txt"));
  std::ofstream ind(dir / (name + "_graph_indicator.txt"));
  std::ofstream lab(dir / (name + "_node_labels.txt"));
  if (!a || !ind || !lab) throw FormatError("cannot open output files in " + dir.string());

  int base = 0;
  for (std::size_t gi = 0; gi < ds.graphs.size(); ++gi) {
    const auto& g = ds.graphs[gi];
    for (NodeId v = 0; v < g.node_count(); ++v) {
      ind << (gi + 1) << "\n";
      lab << ds.raw_label_of.at(g.label(v)) << "\n";
    }
    for (const auto& [u, v] : g.edges()) {
      a << (base + u + 1) << ", " << (base + v + 1) << "\n";
      a << (base + v + 1) << ", " << (base + u + 1) << "\n";
    }
    base += g.node_count();
  }
}

}  // namespace nsm
