// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cassert>
#include <chrono>
#include <optional>

#include "nsm/graph.hpp"
#include "nsm/isomorphism.hpp"
#include "nsm/rng.hpp"

namespace nsm {

struct SamplerConfig {
  int data_walk_min = 10;
  int data_walk_max = 30;
  double query_fraction_min = 0.25;
  double query_fraction_max = 0.5;
  int negative_retry_cap = 20;
  std::chrono::milliseconds oracle_timeout{1000};
  std::uint64_t seed = 0;

  void validate() const {
    if (data_walk_min < 1 || data_walk_min > data_walk_max)
      throw std::invalid_argument("SamplerConfig: need 1 <= data_walk_min <= data_walk_max");
    if (query_fraction_min <= 0.0 || query_fraction_min > query_fraction_max ||
        query_fraction_max > 1.0)
      throw std::invalid_argument("SamplerConfig: fractions must satisfy 0 < min <= max <= 1");
    if (negative_retry_cap < 1)
      throw std::invalid_argument("SamplerConfig: negative_retry_cap must be >= 1");
    if (oracle_timeout.count() <= 0)
      throw std::invalid_argument("SamplerConfig: oracle_timeout must be > 0");
  }
};

enum class PairProvenance { positive_by_construction, negative_verified };

struct PairExample {
  LabeledGraph query;
  LabeledGraph data;
  int label = 0;  // 1 matchable, 0 unmatchable
  PairProvenance provenance = PairProvenance::positive_by_construction;
};

struct Triplet {
  LabeledGraph data;
  LabeledGraph positive;
  LabeledGraph negative;
};

struct TripletBatch {
  std::vector<Triplet> triplets;
  int failed_slots = 0;
};

// Uniform start node, then repeatedly pick a uniformly random
// (visited, unvisited-neighbor) frontier edge until n nodes are visited or the
// frontier empties. Returns the induced subgraph on the visited set.
inline LabeledGraph random_walk_sample(const LabeledGraph& g, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("random_walk_sample: n must be >= 1");
  std::vector<char> visited(g.node_count(), 0);
  std::vector<NodeId> members;
  NodeId start = static_cast<NodeId>(rng.uniform_index(g.node_count()));
  visited[start] = 1;
  members.push_back(start);
  while (static_cast<int>(members.size()) < n) {
    std::vector<std::pair<NodeId, NodeId>> frontier;
    for (NodeId u : members)
      for (NodeId v : g.neighbors(u))
        if (!visited[v]) frontier.emplace_back(u, v);
    if (frontier.empty()) break;
    const auto [u, v] = frontier[rng.uniform_index(frontier.size())];
    visited[v] = 1;
    members.push_back(v);
  }
  return induced_subgraph(g, members);
}

namespace detail {

inline int draw_query_size(int data_nodes, const SamplerConfig& cfg, Rng& rng) {
  const double f = rng.uniform_real(cfg.query_fraction_min, cfg.query_fraction_max);
  return std::max(1, static_cast<int>(std::lround(f * data_nodes)));
}

}  // namespace detail

// Matchable query: a walk inside the data graph; positive by construction
// (identity injection).
inline LabeledGraph sample_positive(const LabeledGraph& d, const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  const int n = std::min(detail::draw_query_size(d.node_count(), cfg, rng), d.node_count());
  LabeledGraph q = random_walk_sample(d, n, rng);
#ifndef NDEBUG
  const auto check = find_subgraph_isomorphism(q, d, cfg.oracle_timeout);
  assert(check.verdict == Verdict::match);
#endif
  return q;
}

// Unmatchable query: a walk drawn from a different corpus graph, accepted only
// when the oracle returns NoMatch against d within the timeout. Timeouts are
// rejected (conservative). Returns nullopt after negative_retry_cap failures.
inline std::optional<LabeledGraph> sample_negative(const LabeledGraph& d,
                                                   const std::vector<LabeledGraph>& corpus,
                                                   const SamplerConfig& cfg, Rng& rng,
                                                   int exclude_index = -1) {
  cfg.validate();
  if (corpus.size() < 2 && exclude_index >= 0) return std::nullopt;
  if (corpus.empty()) return std::nullopt;
  for (int attempt = 0; attempt < cfg.negative_retry_cap; ++attempt) {
    std::size_t donor = rng.uniform_index(corpus.size());
    if (static_cast<int>(donor) == exclude_index) continue;
    const LabeledGraph& src = corpus[donor];
    const int n = std::min(detail::draw_query_size(d.node_count(), cfg, rng), src.node_count());
    LabeledGraph q = random_walk_sample(src, n, rng);
    const auto outcome = find_subgraph_isomorphism(q, d, cfg.oracle_timeout);
    if (outcome.verdict == Verdict::no_match) return q;
  }
  return std::nullopt;
}

// One training unit: data walk, matchable query, verified unmatchable query.
// Slots whose negative cannot be found within the retry cap are skipped.
inline TripletBatch sample_triplet_batch(const std::vector<LabeledGraph>& graphs,
                                         const SamplerConfig& cfg, Rng& rng, int batch_size) {
  cfg.validate();
  if (graphs.empty()) throw std::invalid_argument("sample_triplet_batch: empty corpus");
  TripletBatch batch;
  for (int slot = 0; slot < batch_size; ++slot) {
    Rng slot_rng = rng.child(slot);
    const int src = static_cast<int>(slot_rng.uniform_index(graphs.size()));
    const LabeledGraph& base = graphs[src];
    const int n = std::min(slot_rng.uniform_int(cfg.data_walk_min, cfg.data_walk_max),
                           base.node_count());
    LabeledGraph data = random_walk_sample(base, n, slot_rng);
    LabeledGraph pos = sample_positive(data, cfg, slot_rng);
    auto neg = sample_negative(data, graphs, cfg, slot_rng, src);
    if (!neg) {
      ++batch.failed_slots;
      continue;
    }
    batch.triplets.push_back({std::move(data), std::move(pos), std::move(*neg)});
  }
  return batch;
}

struct Split {
  std::vector<int> train, val, test;
};

// Seeded shuffle, then 4:1 train/test with a fifth of the train pool held out
// for validation. Partitions are disjoint and exhaustive.
inline Split build_split(int num_graphs, std::uint64_t seed) {
  if (num_graphs < 1) throw std::invalid_argument("build_split: empty dataset");
  std::vector<int> order(num_graphs);
  for (int i = 0; i < num_graphs; ++i) order[i] = i;
  Rng rng(splitmix64(seed ^ 0x59717ULL));
  rng.shuffle(order);
  const int pool = num_graphs * 4 / 5;
  const int train = pool * 4 / 5;
  Split s;
  s.train.assign(order.begin(), order.begin() + train);
  s.val.assign(order.begin() + train, order.begin() + pool);
  s.test.assign(order.begin() + pool, order.end());
  return s;
}

inline Split build_split(const GraphDataset& ds, std::uint64_t seed) {
  return build_split(static_cast<int>(ds.graphs.size()), seed);
}

// Nested chain Q1 > Q2 > ... for ranking: each member is a walk inside the
// previous one with strictly fewer nodes, so every adjacent pair (and every
// member against d) is a subgraph isomorphism by construction. Ground-truth
// rank is node count descending. May return fewer members than asked when d
// is too small.
inline std::vector<LabeledGraph> build_nested_chain(const LabeledGraph& d, int length,
                                                    const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  if (length < 1) throw std::invalid_argument("build_nested_chain: length must be >= 1");
  const int first = std::min(
      d.node_count(),
      std::max(detail::draw_query_size(d.node_count(), cfg, rng), length));
  const int last = std::max(1, static_cast<int>(std::lround(cfg.query_fraction_min * first)));

  std::vector<int> sizes;
  for (int i = 0; i < length; ++i) {
    const double t = (length == 1) ? 0.0 : static_cast<double>(i) / (length - 1);
    int n = static_cast<int>(std::lround(first + t * (last - first)));
    if (!sizes.empty()) n = std::min(n, sizes.back() - 1);
    if (n < 1) break;
    sizes.push_back(n);
  }

  std::vector<LabeledGraph> chain;
  const LabeledGraph* cur = &d;
  for (int n : sizes) {
    chain.push_back(random_walk_sample(*cur, n, rng));
    cur = &chain.back();
    if (cur->node_count() < n) break;  // frontier exhausted early; keep what nests
  }
  return chain;
}

// Random connected labeled graph: a random attachment tree plus
// round(extra_edge_factor * n) extra distinct edges. Test and synthetic-corpus
// utility.
inline LabeledGraph random_connected_graph(int n, int num_labels, double extra_edge_factor,
                                           Rng& rng) {
  if (n < 1 || num_labels < 1)
    throw std::invalid_argument("random_connected_graph: bad arguments");
  std::vector<LabelId> labels(n);
  for (auto& l : labels) l = static_cast<LabelId>(rng.uniform_index(num_labels));
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (int v = 1; v < n; ++v)
    edges.emplace_back(static_cast<NodeId>(rng.uniform_index(v)), v);
  const int extra = static_cast<int>(std::lround(extra_edge_factor * n));
  for (int i = 0; i < extra && n >= 3; ++i) {
    NodeId u = static_cast<NodeId>(rng.uniform_index(n));
    NodeId v = static_cast<NodeId>(rng.uniform_index(n));
    if (u != v) edges.emplace_back(u, v);
  }
  return LabeledGraph::from_edges(std::move(labels), std::move(edges));
}

inline GraphDataset make_synthetic_corpus(int num_graphs, int min_nodes, int max_nodes,
                                          int num_labels, double extra_edge_factor,
                                          std::uint64_t seed, const std::string& name) {
  if (num_graphs < 1) throw std::invalid_argument("make_synthetic_corpus: need >= 1 graph");
  GraphDataset ds;
  ds.name = name;
  ds.label_alphabet_size = num_labels;
  for (int l = 0; l < num_labels; ++l) ds.raw_label_of.push_back(l);
  Rng rng(splitmix64(seed ^ 0xc04055ULL));
  for (int i = 0; i < num_graphs; ++i) {
    Rng g_rng = rng.child(i);
    const int n = g_rng.uniform_int(min_nodes, max_nodes);
    ds.graphs.push_back(random_connected_graph(n, num_labels, extra_edge_factor, g_rng));
  }
  ds.validate();
  return ds;
}

}  // namespace nsm
