// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nsm {

using NodeId = int;
using LabelId = int;

// Undirected node-labeled graph with CSR adjacency. Neighbor lists are sorted
// ascending; this canonical order is what makes runs bit-reproducible.
// Immutable after construction.
class LabeledGraph {
 public:
  LabeledGraph() = default;

  // Builds from an edge list. Edges may appear in either or both directions;
  // duplicates are merged. Self-loops are rejected.
  static LabeledGraph from_edges(std::vector<LabelId> labels,
                                 std::vector<std::pair<NodeId, NodeId>> edges) {
    const int n = static_cast<int>(labels.size());
    for (auto& [u, v] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n)
        throw std::invalid_argument("LabeledGraph: edge endpoint out of range");
      if (u == v) throw std::invalid_argument("LabeledGraph: self-loop");
      if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    LabeledGraph g;
    g.labels_ = std::move(labels);
    g.offsets_.assign(n + 1, 0);
    for (const auto& [u, v] : edges) {
      ++g.offsets_[u + 1];
      ++g.offsets_[v + 1];
    }
    for (int i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.nbrs_.resize(g.offsets_[n]);
    std::vector<int> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
      g.nbrs_[cursor[u]++] = v;
      g.nbrs_[cursor[v]++] = u;
    }
    for (int v = 0; v < n; ++v) {
      auto s = g.nbrs_.begin() + g.offsets_[v];
      auto e = g.nbrs_.begin() + g.offsets_[v + 1];
      std::sort(s, e);
    }
    g.edge_count_ = static_cast<int>(edges.size());
    return g;
  }

  int node_count() const { return static_cast<int>(labels_.size()); }
  int edge_count() const { return edge_count_; }

  LabelId label(NodeId v) const { return labels_[v]; }
  const std::vector<LabelId>& labels() const { return labels_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {nbrs_.data() + offsets_[v], nbrs_.data() + offsets_[v + 1]};
  }

  int degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  bool has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  bool valid_node(NodeId v) const { return v >= 0 && v < node_count(); }

  // Edges as (u, v) with u < v, lexicographically sorted.
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < node_count(); ++u)
      for (NodeId v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  LabelId max_label() const {
    LabelId m = -1;
    for (LabelId l : labels_) m = std::max(m, l);
    return m;
  }

  bool is_connected() const {
    const int n = node_count();
    if (n == 0) return false;
    std::vector<char> seen(n, 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : neighbors(u))
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
    }
    return count == n;
  }

  bool operator==(const LabeledGraph& o) const {
    return labels_ == o.labels_ && offsets_ == o.offsets_ && nbrs_ == o.nbrs_;
  }

 private:
  std::vector<LabelId> labels_;
  std::vector<int> offsets_;
  std::vector<NodeId> nbrs_;
  int edge_count_ = 0;
};

// Node-induced subgraph. Nodes are relabeled 0..k-1 in ascending original-id
// order; duplicate ids in `nodes` are merged.
inline LabeledGraph induced_subgraph(const LabeledGraph& g, std::vector<NodeId> nodes) {
  if (nodes.empty()) throw std::invalid_argument("induced_subgraph: empty node set");
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  for (NodeId v : nodes)
    if (!g.valid_node(v)) throw std::invalid_argument("induced_subgraph: invalid node id");

  std::vector<int> new_id(g.node_count(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) new_id[nodes[i]] = static_cast<int>(i);

  std::vector<LabelId> labels(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) labels[i] = g.label(nodes[i]);

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u : nodes)
    for (NodeId v : g.neighbors(u))
      if (u < v && new_id[v] >= 0) edges.emplace_back(new_id[u], new_id[v]);
  return LabeledGraph::from_edges(std::move(labels), std::move(edges));
}

struct KHopResult {
  LabeledGraph graph;
  NodeId center;  // the root's id inside `graph`
};

// Induced subgraph on the nodes within shortest-path distance <= k of root.
inline KHopResult k_hop_neighborhood(const LabeledGraph& g, NodeId root, int k) {
  if (!g.valid_node(root)) throw std::invalid_argument("k_hop_neighborhood: invalid root");
  if (k < 0) throw std::invalid_argument("k_hop_neighborhood: k must be >= 0");
  std::vector<int> dist(g.node_count(), -1);
  std::vector<NodeId> frontier{root}, members{root};
  dist[root] = 0;
  for (int level = 0; level < k && !frontier.empty(); ++level) {
    std::vector<NodeId> next;
    for (NodeId u : frontier)
      for (NodeId v : g.neighbors(u))
        if (dist[v] < 0) {
          dist[v] = level + 1;
          next.push_back(v);
          members.push_back(v);
        }
    frontier = std::move(next);
  }
  std::sort(members.begin(), members.end());
  NodeId center = static_cast<NodeId>(
      std::lower_bound(members.begin(), members.end(), root) - members.begin());
  return {induced_subgraph(g, members), center};
}

inline std::vector<std::vector<NodeId>> connected_components(const LabeledGraph& g) {
  std::vector<std::vector<NodeId>> comps;
  std::vector<char> seen(g.node_count(), 0);
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (seen[s]) continue;
    std::vector<NodeId> comp, stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (NodeId v : g.neighbors(u))
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

// A corpus of graphs sharing one dense label alphabet. raw_label_of maps a
// dense label id back to the label value found in the source files (identity
// for synthetic corpora).
struct GraphDataset {
  std::vector<LabeledGraph> graphs;
  int label_alphabet_size = 0;
  std::string name;
  std::vector<long long> raw_label_of;

  void validate() const {
    if (static_cast<int>(raw_label_of.size()) != label_alphabet_size)
      throw std::invalid_argument("GraphDataset: raw label map size mismatch");
    for (const auto& g : graphs) {
      if (g.node_count() == 0) throw std::invalid_argument("GraphDataset: empty graph");
      if (!g.is_connected()) throw std::invalid_argument("GraphDataset: disconnected graph");
      for (LabelId l : g.labels())
        if (l < 0 || l >= label_alphabet_size)
          throw std::invalid_argument("GraphDataset: label outside alphabet");
    }
  }
};

}  // namespace nsm
