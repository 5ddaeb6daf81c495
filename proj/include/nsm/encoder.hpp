// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "nsm/graph.hpp"
#include "nsm/rng.hpp"
#include "nsm/tensor.hpp"

namespace nsm {

enum class CombineMode { gru, sum_ablation };

inline const char* combine_mode_name(CombineMode m) {
  return m == CombineMode::gru ? "gru" : "sum_ablation";
}

struct EncoderConfig {
  int num_layers = 6;
  int hidden_dim = 64;  // per-node width inside the message-passing stack
  int out_dim = 32;     // embedding width after the hash MLP
  CombineMode combine = CombineMode::gru;
  double clamp_floor = 1e-7;

  void validate() const {
    if (num_layers < 1) throw std::invalid_argument("EncoderConfig: num_layers must be >= 1");
    if (hidden_dim != 2 * out_dim)
      throw std::invalid_argument("EncoderConfig: hidden_dim must equal 2 * out_dim");
    if (clamp_floor <= 0.0) throw std::invalid_argument("EncoderConfig: clamp_floor must be > 0");
  }
};

// Learned weights: preprocessing linear, per-layer GRU gates, shared two-layer
// hash MLP, shared post-pool linear.
struct EncoderParams {
  EncoderConfig config;
  int label_alphabet_size = 0;
  ad::ParamStore store;
};

namespace detail {

inline std::vector<double> glorot_uniform(int rows, int cols, Rng& rng) {
  const double a = std::sqrt(6.0 / (rows + cols));
  std::vector<double> v(static_cast<std::size_t>(rows) * cols);
  for (auto& x : v) x = rng.uniform_real(-a, a);
  return v;
}

inline std::string gru_param_name(int layer, const char* gate) {
  return "gru" + std::to_string(layer) + "." + gate;
}

}  // namespace detail

// Glorot-uniform weights, zero biases; deterministic per seed.
inline EncoderParams init_params(const EncoderConfig& cfg, int label_alphabet_size,
                                 std::uint64_t seed) {
  cfg.validate();
  if (label_alphabet_size < 1)
    throw std::invalid_argument("init_params: label alphabet must be non-empty");
  EncoderParams p;
  p.config = cfg;
  p.label_alphabet_size = label_alphabet_size;
  Rng rng(splitmix64(seed ^ 0xe0c0de5eedULL));
  const int h = cfg.hidden_dim, d = cfg.out_dim;

  auto weight = [&](const std::string& name, int rows, int cols) {
    p.store.add(name, rows, cols, detail::glorot_uniform(rows, cols, rng));
  };
  auto bias = [&](const std::string& name, int cols) {
    p.store.add(name, 1, cols, std::vector<double>(cols, 0.0));
  };

  weight("pre.w", label_alphabet_size, h);
  bias("pre.b", h);
  for (int l = 1; l <= cfg.num_layers; ++l) {
    for (const char* gate : {"wz", "uz", "wr", "ur", "wh", "uh"})
      weight(detail::gru_param_name(l, gate), h, h);
    for (const char* gate : {"bz", "br", "bh"}) bias(detail::gru_param_name(l, gate), h);
  }
  weight("hash.w1", h, d);
  bias("hash.b1", d);
  weight("hash.w2", d, d);
  bias("hash.b2", d);
  weight("post.w", d, d);
  bias("post.b", d);
  return p;
}

// Tape-resident views of the parameters, leafed once per recording.
struct EncoderLeafs {
  ad::Tensor pre_w, pre_b;
  struct GruLeafs {
    ad::Tensor wz, uz, bz, wr, ur, br, wh, uh, bh;
  };
  std::vector<GruLeafs> layers;
  ad::Tensor hash_w1, hash_b1, hash_w2, hash_b2;
  ad::Tensor post_w, post_b;
};

inline EncoderLeafs leaf_params(ad::Tape& tape, const EncoderParams& p) {
  auto leaf = [&](const std::string& name) { return tape.param(p.store, p.store.id_of(name)); };
  EncoderLeafs l;
  l.pre_w = leaf("pre.w");
  l.pre_b = leaf("pre.b");
  for (int i = 1; i <= p.config.num_layers; ++i) {
    auto g = [&](const char* gate) { return leaf(detail::gru_param_name(i, gate)); };
    l.layers.push_back({g("wz"), g("uz"), g("bz"), g("wr"), g("ur"), g("br"), g("wh"), g("uh"),
                        g("bh")});
  }
  l.hash_w1 = leaf("hash.w1");
  l.hash_b1 = leaf("hash.b1");
  l.hash_w2 = leaf("hash.w2");
  l.hash_b2 = leaf("hash.b2");
  l.post_w = leaf("post.w");
  l.post_b = leaf("post.b");
  return l;
}

namespace detail {

// z = sig(x Wz + h Uz + bz); r = sig(x Wr + h Ur + br);
// cand = tanh(x Wh + (r*h) Uh + bh); out = h + z * (cand - h).
inline ad::Tensor gru_combine(ad::Tape& t, ad::Tensor x, ad::Tensor h,
                              const EncoderLeafs::GruLeafs& g) {
  using namespace ad;
  Tensor z = sigmoid(t, add(t, add(t, matmul(t, x, g.wz), matmul(t, h, g.uz)), g.bz));
  Tensor r = sigmoid(t, add(t, add(t, matmul(t, x, g.wr), matmul(t, h, g.ur)), g.br));
  Tensor cand =
      ad::tanh(t, add(t, add(t, matmul(t, x, g.wh), matmul(t, multiply(t, r, h), g.uh)), g.bh));
  return add(t, h, multiply(t, z, subtract(t, cand, h)));
}

inline ad::Tensor one_hot_labels(ad::Tape& t, const LabeledGraph& g, int alphabet) {
  std::vector<double> x(static_cast<std::size_t>(g.node_count()) * alphabet, 0.0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.label(v) >= alphabet)
      throw std::invalid_argument("encode: graph label outside encoder alphabet");
    x[static_cast<std::size_t>(v) * alphabet + g.label(v)] = 1.0;
  }
  return t.constant(g.node_count(), alphabet, std::move(x));
}

inline ad::Tensor adjacency_matrix(ad::Tape& t, const LabeledGraph& g) {
  const int n = g.node_count();
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v : g.neighbors(u)) a[static_cast<std::size_t>(u) * n + v] = 1.0;
  return t.constant(n, n, std::move(a));
}

}  // namespace detail

struct EncoderActivations {
  ad::Tensor graph_embedding;               // 1 x d, clamped positive
  std::vector<ad::Tensor> layer_nodes;      // K matrices |V| x 2d (combine outputs)
  std::vector<ad::Tensor> hashed_nodes;     // K matrices |V| x d
  ad::Tensor node_summaries;                // |V| x d, clamped (only if requested)
  bool has_node_summaries = false;
};

// Runs the full encoding stage on the tape: preprocessing linear, K message
// passing layers (sum aggregation, GRU or ablation combine, layer_norm+relu
// between layers), shared hash MLP per layer, per-layer column max + linear,
// cross-layer mean, positive clamp.
inline EncoderActivations encode_on_tape(ad::Tape& t, const LabeledGraph& g,
                                         const EncoderLeafs& leafs, const EncoderConfig& cfg,
                                         bool with_node_summaries = false) {
  using namespace ad;
  cfg.validate();
  EncoderActivations act;

  Tensor x = detail::one_hot_labels(t, g, leafs.pre_w.rows);
  Tensor adj = detail::adjacency_matrix(t, g);
  Tensor cur = add(t, matmul(t, x, leafs.pre_w), leafs.pre_b);

  auto hash_rows = [&](Tensor m) {
    Tensor h1 = relu(t, add(t, matmul(t, m, leafs.hash_w1), leafs.hash_b1));
    return add(t, matmul(t, h1, leafs.hash_w2), leafs.hash_b2);
  };

  for (int layer = 0; layer < cfg.num_layers; ++layer) {
    Tensor agg = matmul(t, adj, cur);
    Tensor combined = (cfg.combine == CombineMode::gru)
                          ? detail::gru_combine(t, agg, cur, leafs.layers[layer])
                          : add(t, agg, cur);
    act.layer_nodes.push_back(combined);
    act.hashed_nodes.push_back(hash_rows(combined));
    cur = (layer + 1 < cfg.num_layers) ? relu(t, layer_norm(t, combined)) : combined;
  }

  Tensor pooled_mean;  // 1 x d mean over layers of (column max -> post linear)
  for (int layer = 0; layer < cfg.num_layers; ++layer) {
    Tensor pooled = add(t, matmul(t, column_max(t, act.hashed_nodes[layer]), leafs.post_w),
                        leafs.post_b);
    pooled_mean = (layer == 0) ? pooled : add(t, pooled_mean, pooled);
  }
  pooled_mean = scale(t, pooled_mean, 1.0 / cfg.num_layers);
  act.graph_embedding = clamp_min(t, pooled_mean, cfg.clamp_floor);

  if (with_node_summaries) {
    Tensor sum;  // |V| x d mean over layers of post-linear hashed rows
    for (int layer = 0; layer < cfg.num_layers; ++layer) {
      Tensor rows = add(t, matmul(t, act.hashed_nodes[layer], leafs.post_w), leafs.post_b);
      sum = (layer == 0) ? rows : add(t, sum, rows);
    }
    act.node_summaries = clamp_min(t, scale(t, sum, 1.0 / cfg.num_layers), cfg.clamp_floor);
    act.has_node_summaries = true;
  }
  return act;
}

struct GraphEmbedding {
  std::vector<double> values;  // length d, every coordinate >= clamp floor
};

struct NodeEmbeddings {
  int node_count = 0;
  int hidden_dim = 0;
  int out_dim = 0;
  std::vector<std::vector<double>> layer_values;   // K matrices |V| x 2d, row major
  std::vector<std::vector<double>> hashed_values;  // K matrices |V| x d, row major
  std::vector<double> summaries;                   // |V| x d, row major, clamped

  std::span<const double> summary_row(NodeId v) const {
    return {summaries.data() + static_cast<std::size_t>(v) * out_dim,
            static_cast<std::size_t>(out_dim)};
  }
};

inline NodeEmbeddings encode_nodes(const LabeledGraph& g, const EncoderParams& params) {
  ad::Tape tape;
  auto leafs = leaf_params(tape, params);
  auto act = encode_on_tape(tape, g, leafs, params.config, /*with_node_summaries=*/true);
  NodeEmbeddings out;
  out.node_count = g.node_count();
  out.hidden_dim = params.config.hidden_dim;
  out.out_dim = params.config.out_dim;
  for (const auto& t : act.layer_nodes) out.layer_values.push_back(tape.value(t));
  for (const auto& t : act.hashed_nodes) out.hashed_values.push_back(tape.value(t));
  out.summaries = tape.value(act.node_summaries);
  return out;
}

inline GraphEmbedding encode_graph(const LabeledGraph& g, const EncoderParams& params) {
  ad::Tape tape;
  auto leafs = leaf_params(tape, params);
  auto act = encode_on_tape(tape, g, leafs, params.config);
  return GraphEmbedding{tape.value(act.graph_embedding)};
}

// Elementwise equal to independent encode_graph calls, order preserved;
// graphs are independent recordings, so workers just split the list.
inline std::vector<GraphEmbedding> encode_batch(const std::vector<LabeledGraph>& graphs,
                                                const EncoderParams& params, int threads = 1) {
  std::vector<GraphEmbedding> out(graphs.size());
  if (threads <= 1 || graphs.size() < 2) {
    for (std::size_t i = 0; i < graphs.size(); ++i) out[i] = encode_graph(graphs[i], params);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < graphs.size(); i = next.fetch_add(1))
        out[i] = encode_graph(graphs[i], params);
    });
  for (auto& th : pool) th.join();
  return out;
}

// Single GRU combination step on plain vectors (layer is 1-based).
inline std::vector<double> gru_cell(std::span<const double> input, std::span<const double> hidden,
                                    const EncoderParams& params, int layer) {
  const int h = params.config.hidden_dim;
  if (static_cast<int>(input.size()) != h || static_cast<int>(hidden.size()) != h)
    throw std::invalid_argument("gru_cell: vectors must have length hidden_dim");
  if (layer < 1 || layer > params.config.num_layers)
    throw std::invalid_argument("gru_cell: layer out of range");
  ad::Tape tape;
  auto leafs = leaf_params(tape, params);
  ad::Tensor x = tape.constant(1, h, {input.begin(), input.end()});
  ad::Tensor hh = tape.constant(1, h, {hidden.begin(), hidden.end()});
  return tape.value(detail::gru_combine(tape, x, hh, leafs.layers[layer - 1]));
}

}  // namespace nsm
