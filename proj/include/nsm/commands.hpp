// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "nsm/checkpoint.hpp"
#include "nsm/config.hpp"
#include "nsm/graph_io.hpp"
#include "nsm/measure.hpp"
#include "nsm/metrics.hpp"
#include "nsm/sampler.hpp"
#include "nsm/trainer.hpp"

namespace nsm {

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty list");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// One offline labeled pair set: a query corpus, a data corpus, and the rows
// tying them together.
struct LoadedPairSet {
  GraphDataset queries;
  GraphDataset datas;
  std::vector<PairRow> rows;

  std::vector<PairExample> to_examples() const {
    std::vector<PairExample> out;
    for (const auto& r : rows) {
      if (r.label == PairLabel::unknown) continue;
      PairExample e;
      e.query = queries.graphs.at(r.query_index);
      e.data = datas.graphs.at(r.data_index);
      e.label = (r.label == PairLabel::positive) ? 1 : 0;
      e.provenance = e.label ? PairProvenance::positive_by_construction
                             : PairProvenance::negative_verified;
      out.push_back(std::move(e));
    }
    return out;
  }
};

inline LoadedPairSet load_pair_set(const std::filesystem::path& dir, const std::string& split,
                                   const std::vector<long long>& alphabet) {
  TuLoadOptions keep_all{.min_component_size = 1};
  LoadedPairSet set;
  set.queries = load_tu_dataset_with_alphabet(dir, split + "_query", alphabet, keep_all);
  set.datas = load_tu_dataset_with_alphabet(dir, split + "_data", alphabet, keep_all);
  set.rows = read_pair_csv(dir / (split + "_pairs.csv"));
  for (const auto& r : set.rows)
    if (r.query_index < 0 || r.query_index >= static_cast<int>(set.queries.graphs.size()) ||
        r.data_index < 0 || r.data_index >= static_cast<int>(set.datas.graphs.size()))
      throw FormatError("pair csv references a graph outside the corpora");
  return set;
}

inline std::vector<long long> base_alphabet(const std::filesystem::path& data_dir) {
  TuLoadOptions keep_all{.min_component_size = 1};
  return load_tu_dataset(data_dir, "base", keep_all).raw_label_of;
}

namespace detail {

struct GeneratedSet {
  GraphDataset queries;
  GraphDataset datas;
  std::vector<PairRow> rows;
  int failed_slots = 0;
};

inline GeneratedSet generate_pair_set(const GraphDataset& corpus, const std::vector<int>& pool,
                                      int triplets, const SamplerConfig& cfg, Rng seed_rng) {
  GeneratedSet out;
  out.queries.label_alphabet_size = corpus.label_alphabet_size;
  out.queries.raw_label_of = corpus.raw_label_of;
  out.datas.label_alphabet_size = corpus.label_alphabet_size;
  out.datas.raw_label_of = corpus.raw_label_of;
  if (pool.empty()) throw std::invalid_argument("generate_pair_set: empty graph pool");

  std::vector<LabeledGraph> pool_graphs;
  for (int idx : pool) pool_graphs.push_back(corpus.graphs.at(idx));

  for (int i = 0; i < triplets; ++i) {
    Rng rng = seed_rng.child(i);
    const int src = static_cast<int>(rng.uniform_index(pool_graphs.size()));
    const LabeledGraph& base = pool_graphs[src];
    const int n = std::min(rng.uniform_int(cfg.data_walk_min, cfg.data_walk_max),
                           base.node_count());
    LabeledGraph data = random_walk_sample(base, n, rng);
    LabeledGraph pos = sample_positive(data, cfg, rng);
    auto neg = sample_negative(data, pool_graphs, cfg, rng, src);
    if (!neg) {
      ++out.failed_slots;
      continue;
    }
    const int d_idx = static_cast<int>(out.datas.graphs.size());
    out.datas.graphs.push_back(std::move(data));
    const int qp_idx = static_cast<int>(out.queries.graphs.size());
    out.queries.graphs.push_back(std::move(pos));
    const int qn_idx = static_cast<int>(out.queries.graphs.size());
    out.queries.graphs.push_back(std::move(*neg));
    out.rows.push_back({qp_idx, d_idx, PairLabel::positive});
    out.rows.push_back({qn_idx, d_idx, PairLabel::negative});
  }
  return out;
}

}  // namespace detail

inline GraphDataset materialize_base_corpus(const RunConfig& cfg) {
  if (cfg.dataset.source == "synthetic") {
    const auto& s = cfg.dataset.synthetic;
    return make_synthetic_corpus(s.num_graphs, s.min_nodes, s.max_nodes, s.num_labels,
                                 s.extra_edge_factor, cfg.seed, cfg.dataset.name);
  }
  return load_tu_dataset(cfg.dataset.dir, cfg.dataset.name,
                         {.min_component_size = cfg.dataset.min_component_size});
}

// sample: materialize the base corpus, split it, generate offline val/test
// pair sets, and write everything (TU corpora, pair CSVs, split file,
// provenance sidecar) under out_dir.
inline void cmd_sample(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  GraphDataset corpus = materialize_base_corpus(cfg);
  write_tu_dataset(corpus, out_dir, "base");

  const Split split = build_split(corpus, cfg.seed);
  detail::write_json(out_dir / "split.json",
                     {{"train", split.train}, {"val", split.val}, {"test", split.test}});

  // the sampler's own stream id separates pair generation from other
  // consumers of the run seed
  Rng root(splitmix64(cfg.seed ^ splitmix64(cfg.sampler.seed ^ 0x5a371eULL)));
  nlohmann::json prov;
  prov["version"] = kVersion;
  prov["config"] = effective_config_json(cfg);
  prov["alphabet"] = corpus.raw_label_of;
  prov["num_graphs"] = corpus.graphs.size();

  const struct {
    const char* name;
    const std::vector<int>* pool;
    int triplets;
    std::uint64_t stream;
  } sets[] = {{"val", &split.val, cfg.eval.val_triplets, 1},
              {"test", &split.test, cfg.eval.test_triplets, 2}};
  for (const auto& s : sets) {
    auto gen = detail::generate_pair_set(corpus, *s.pool, s.triplets, cfg.sampler,
                                         root.child(s.stream));
    if (gen.failed_slots * 2 > s.triplets)
      throw std::runtime_error("sample: negative sampler failed for more than half of the " +
                               std::string(s.name) + " slots (" +
                               std::to_string(gen.failed_slots) + "/" +
                               std::to_string(s.triplets) + ")");
    write_tu_dataset(gen.queries, out_dir, std::string(s.name) + "_query");
    write_tu_dataset(gen.datas, out_dir, std::string(s.name) + "_data");
    write_pair_csv(out_dir / (std::string(s.name) + "_pairs.csv"), gen.rows);
    prov[std::string(s.name) + "_pairs"] = gen.rows.size();
    prov[std::string(s.name) + "_failed_slots"] = gen.failed_slots;
  }
  detail::write_json(out_dir / "sample_provenance.json", prov);
}

// train: load the sampled data dir, run the training loop on the train split
// with the offline val pairs, write checkpoint + CSV log + report.
inline void cmd_train(const RunConfig& cfg, const std::filesystem::path& data_dir,
                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  TuLoadOptions keep_all{.min_component_size = 1};
  GraphDataset corpus = load_tu_dataset(data_dir, "base", keep_all);

  std::ifstream split_in(data_dir / "split.json");
  if (!split_in) throw FormatError("missing split.json in " + data_dir.string());
  nlohmann::json split_j;
  split_in >> split_j;
  std::vector<int> train_idx = split_j.at("train").get<std::vector<int>>();

  LoadedPairSet val = load_pair_set(data_dir, "val", corpus.raw_label_of);
  std::vector<PairExample> val_examples = val.to_examples();

  std::vector<LabeledGraph> train_graphs;
  for (int i : train_idx) train_graphs.push_back(corpus.graphs.at(i));

  std::optional<EncoderParams> init;
  if (!cfg.paths.init_checkpoint.empty())
    init = load_checkpoint(cfg.paths.init_checkpoint).params;

  TrainResult result = train(train_graphs, val_examples, cfg.train, cfg.encoder, cfg.sampler,
                             corpus.label_alphabet_size, cfg.seed,
                             init ? &*init : nullptr);

  const auto ckpt_path = out_dir / "checkpoint.bin";
  save_checkpoint(result.checkpoint, ckpt_path);

  std::string log_csv = "epoch,loss,val_auroc\n";
  for (const auto& row : result.log) {
    log_csv += std::to_string(row.epoch) + "," + detail::fmt_double(row.loss) + ",";
    if (row.val_auroc) log_csv += detail::fmt_double(*row.val_auroc);
    log_csv += "\n";
  }
  detail::write_text(out_dir / "train_log.csv", log_csv);

  nlohmann::json report;
  report["version"] = kVersion;
  report["config"] = effective_config_json(cfg);
  report["best_epoch"] = result.best_epoch;
  report["best_val_auroc"] = result.best_val_auroc;
  report["tau"] = result.checkpoint.tau;
  report["checkpoint_hash"] = file_content_hash(ckpt_path);
  detail::write_json(out_dir / "train_report.json", report);
}

struct EvalSummary {
  double auroc = 0.0;
  double accuracy = 0.0;
  int positives = 0;
  int negatives = 0;
};

// eval: score an offline pair set with a checkpoint; metrics JSON + per-pair
// score CSV.
inline EvalSummary cmd_eval(const RunConfig& cfg, const std::filesystem::path& checkpoint_path,
                            const std::filesystem::path& data_dir, const std::string& split,
                            const std::filesystem::path& out_dir, int threads = 1) {
  std::filesystem::create_directories(out_dir);
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const auto alphabet = base_alphabet(data_dir);
  if (static_cast<int>(alphabet.size()) != ckpt.params.label_alphabet_size)
    throw std::invalid_argument("eval: corpus alphabet does not match checkpoint");
  LoadedPairSet set = load_pair_set(data_dir, split, alphabet);
  if (set.rows.empty()) throw std::invalid_argument("eval: empty pair set");

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<GraphEmbedding> q_emb = encode_batch(set.queries.graphs, ckpt.params, threads);
  std::vector<GraphEmbedding> d_emb = encode_batch(set.datas.graphs, ckpt.params, threads);
  const auto t1 = std::chrono::steady_clock::now();

  std::string csv = "q_idx,d_idx,label,psi,compliance,sdr,hinge\n";
  std::vector<double> pos, neg;
  int correct = 0, labeled = 0;
  std::vector<int> hist_pos(40, 0), hist_neg(40, 0);
  for (const auto& r : set.rows) {
    const ScoreBreakdown s = psi(std::span<const double>(q_emb[r.query_index].values),
                                 std::span<const double>(d_emb[r.data_index].values),
                                 cfg.eval.sdr_reduction);
    csv += std::to_string(r.query_index) + "," + std::to_string(r.data_index) + "," +
           pair_label_name(r.label) + "," + detail::fmt_double(s.psi) + "," +
           detail::fmt_double(s.compliance) + "," + detail::fmt_double(s.sdr) + "," +
           detail::fmt_double(s.hinge) + "\n";
    if (r.label == PairLabel::unknown) continue;
    ++labeled;
    const int bin = std::clamp(static_cast<int>((s.psi + 1.0) / 2.0 * 40.0), 0, 39);
    const int pred = s.psi > ckpt.tau ? 1 : 0;
    if (r.label == PairLabel::positive) {
      pos.push_back(s.psi);
      ++hist_pos[bin];
      if (pred == 1) ++correct;
    } else {
      neg.push_back(s.psi);
      ++hist_neg[bin];
      if (pred == 0) ++correct;
    }
  }
  const auto t2 = std::chrono::steady_clock::now();
  detail::write_text(out_dir / (split + "_scores.csv"), csv);

  EvalSummary summary;
  if (!pos.empty() && !neg.empty()) summary.auroc = auroc(pos, neg);
  summary.accuracy = labeled ? static_cast<double>(correct) / labeled : 0.0;
  summary.positives = static_cast<int>(pos.size());
  summary.negatives = static_cast<int>(neg.size());

  nlohmann::json metrics;
  metrics["version"] = kVersion;
  metrics["config"] = effective_config_json(cfg);
  metrics["checkpoint_hash"] = file_content_hash(checkpoint_path);
  metrics["split"] = split;
  metrics["tau"] = ckpt.tau;
  metrics["auroc"] = summary.auroc;
  metrics["accuracy"] = summary.accuracy;
  metrics["num_positive"] = summary.positives;
  metrics["num_negative"] = summary.negatives;
  metrics["psi_histogram"] = {{"bins", 40},
                              {"range", {-1.0, 1.0}},
                              {"positive", hist_pos},
                              {"negative", hist_neg}};
  if (cfg.eval.emit_timings) {
    metrics["timings"] = {
        {"encode_seconds", std::chrono::duration<double>(t1 - t0).count()},
        {"score_seconds", std::chrono::duration<double>(t2 - t1).count()}};
  }
  detail::write_json(out_dir / (split + "_metrics.json"), metrics);
  std::cerr << "eval " << split << ": auroc=" << summary.auroc
            << " accuracy=" << summary.accuracy << " ("
            << std::chrono::duration<double>(t2 - t0).count() << "s)\n";
  return summary;
}

struct RankSummary {
  // mode name -> per-chain rho values (chains shorter than 2 excluded)
  std::map<std::string, std::vector<double>> rhos;
  int chains_built = 0;
  int chains_short = 0;
};

// rank: nested query chains from test-split graphs, scored with psi, sdr-only
// and compliance-only; reports median and range of Spearman rho per scorer.
inline RankSummary cmd_rank(const RunConfig& cfg, const std::filesystem::path& checkpoint_path,
                            const std::filesystem::path& data_dir,
                            const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  TuLoadOptions keep_all{.min_component_size = 1};
  GraphDataset corpus = load_tu_dataset(data_dir, "base", keep_all);
  std::ifstream split_in(data_dir / "split.json");
  if (!split_in) throw FormatError("missing split.json in " + data_dir.string());
  nlohmann::json split_j;
  split_in >> split_j;
  const std::vector<int> test_idx = split_j.at("test").get<std::vector<int>>();
  if (test_idx.empty()) throw std::invalid_argument("rank: empty test split");

  RankSummary summary;
  Rng root(splitmix64(cfg.seed ^ 0x4a2c8d11ULL));
  nlohmann::json chains_json = nlohmann::json::array();
  const ScorerMode modes[] = {ScorerMode::psi_full, ScorerMode::sdr_only,
                              ScorerMode::compliance_only};
  for (int c = 0; c < cfg.eval.num_chains; ++c) {
    const LabeledGraph& d = corpus.graphs.at(test_idx[c % test_idx.size()]);
    Rng rng = root.child(c);
    const auto chain = build_nested_chain(d, cfg.eval.chain_length, cfg.sampler, rng);
    ++summary.chains_built;
    nlohmann::json entry;
    entry["chain"] = c;
    entry["requested_length"] = cfg.eval.chain_length;
    entry["actual_length"] = chain.size();
    if (static_cast<int>(chain.size()) < cfg.eval.chain_length) ++summary.chains_short;
    if (chain.size() >= 2) {
      for (ScorerMode m : modes) {
        const auto outcome = rank_queries(d, chain, ckpt.params, m);
        summary.rhos[scorer_mode_name(m)].push_back(outcome.rho);
        entry[scorer_mode_name(m)] = outcome.rho;
      }
    }
    chains_json.push_back(entry);
  }

  nlohmann::json report;
  report["version"] = kVersion;
  report["config"] = effective_config_json(cfg);
  report["checkpoint_hash"] = file_content_hash(checkpoint_path);
  report["chains_built"] = summary.chains_built;
  report["chains_shorter_than_requested"] = summary.chains_short;
  for (const auto& [mode, rhos] : summary.rhos) {
    report[mode] = {{"median_rho", detail::median(rhos)},
                    {"min_rho", *std::min_element(rhos.begin(), rhos.end())},
                    {"max_rho", *std::max_element(rhos.begin(), rhos.end())},
                    {"count", rhos.size()}};
  }
  report["chains"] = chains_json;
  detail::write_json(out_dir / "ranking.json", report);
  return summary;
}

struct AlignSummary {
  std::map<int, double> hit_at;  // k -> mean fraction
  int pairs_used = 0;
  int pairs_skipped = 0;
};

// align: for each positive pair, one oracle mapping is the ground truth; node
// level psi ranks data nodes per query node; averaged Hit@K per pair.
inline AlignSummary cmd_align(const RunConfig& cfg, const std::filesystem::path& checkpoint_path,
                              const std::filesystem::path& data_dir, const std::string& split,
                              const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const auto alphabet = base_alphabet(data_dir);
  LoadedPairSet set = load_pair_set(data_dir, split, alphabet);

  AlignSummary summary;
  std::map<int, double> sums;
  for (const auto& r : set.rows) {
    if (r.label != PairLabel::positive) continue;
    const LabeledGraph& q = set.queries.graphs[r.query_index];
    const LabeledGraph& d = set.datas.graphs[r.data_index];
    const auto outcome = find_subgraph_isomorphism(q, d, cfg.sampler.oracle_timeout);
    if (outcome.verdict != Verdict::match) {
      ++summary.pairs_skipped;
      std::cerr << "align: skipping pair (" << r.query_index << "," << r.data_index
                << "): oracle found no mapping (stale label?)\n";
      continue;
    }
    const NodeEmbeddings qn = encode_nodes(q, ckpt.params);
    const NodeEmbeddings dn = encode_nodes(d, ckpt.params);
    const auto scores = node_pair_scores(qn, dn);
    for (int k : cfg.eval.hit_ks)
      sums[k] += hit_at_k(scores, q.node_count(), d.node_count(), outcome.mapping, k);
    ++summary.pairs_used;
  }
  if (summary.pairs_used == 0) throw std::invalid_argument("align: no usable positive pairs");
  for (auto& [k, s] : sums) summary.hit_at[k] = s / summary.pairs_used;

  nlohmann::json report;
  report["version"] = kVersion;
  report["config"] = effective_config_json(cfg);
  report["checkpoint_hash"] = file_content_hash(checkpoint_path);
  report["split"] = split;
  report["pairs_used"] = summary.pairs_used;
  report["pairs_skipped"] = summary.pairs_skipped;
  nlohmann::json hits;
  for (const auto& [k, v] : summary.hit_at) hits[std::to_string(k)] = v;
  report["hit_at_k"] = hits;
  detail::write_json(out_dir / (split + "_align.json"), report);
  return summary;
}

inline constexpr char kIndexMagic[8] = {'N', 'S', 'M', 'I', 'N', 'D', 'X', '1'};

// index: embed every node's k-hop neighborhood of one big graph and persist
// the table (JSON meta + little-endian doubles).
inline void cmd_index(const RunConfig& cfg, const std::filesystem::path& checkpoint_path,
                      const std::filesystem::path& graph_dir, const std::string& graph_name,
                      int graph_index, int k, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  if (k < 1) throw std::invalid_argument("index: k must be >= 1");
  TuLoadOptions keep_all{.min_component_size = 1};
  GraphDataset corpus = load_tu_dataset(graph_dir, graph_name, keep_all);
  if (static_cast<int>(corpus.raw_label_of.size()) > ckpt.params.label_alphabet_size)
    throw std::invalid_argument("index: corpus alphabet exceeds checkpoint alphabet");
  const LabeledGraph& g = corpus.graphs.at(graph_index);

  nlohmann::json meta;
  meta["version"] = kVersion;
  meta["config"] = effective_config_json(cfg);
  meta["checkpoint_hash"] = file_content_hash(checkpoint_path);
  meta["k"] = k;
  meta["dim"] = ckpt.params.config.out_dim;
  meta["node_count"] = g.node_count();
  meta["tau"] = ckpt.tau;
  meta["alphabet"] = corpus.raw_label_of;
  detail::write_json(out_dir / "index_meta.json", meta);

  std::ofstream bin(out_dir / "index_embeddings.bin", std::ios::binary);
  if (!bin) throw FormatError("cannot write index embeddings");
  bin.write(kIndexMagic, sizeof(kIndexMagic));
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const KHopResult hop = k_hop_neighborhood(g, v, k);
    const GraphEmbedding emb = encode_graph(hop.graph, ckpt.params);
    for (double x : emb.values) detail::write_f64_le(bin, x);
  }
}

struct QueryDecision {
  int query_index = 0;
  int decision = 0;
  double max_psi = 0.0;
  int argmax_node = 0;
};

// query: match queries against a persisted node-neighborhood index; a query
// matches iff the max over nodes of psi(query, node neighborhood) exceeds tau.
inline std::vector<QueryDecision> cmd_query(const std::filesystem::path& checkpoint_path,
                                            const std::filesystem::path& index_dir,
                                            const std::filesystem::path& query_dir,
                                            const std::string& query_name,
                                            const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  Checkpoint ckpt = load_checkpoint(checkpoint_path);

  std::ifstream meta_in(index_dir / "index_meta.json");
  if (!meta_in) throw FormatError("missing index_meta.json in " + index_dir.string());
  nlohmann::json meta;
  meta_in >> meta;
  const int dim = meta.at("dim").get<int>();
  const int node_count = meta.at("node_count").get<int>();
  const double tau = meta.at("tau").get<double>();
  if (dim != ckpt.params.config.out_dim)
    throw std::invalid_argument("query: index dimension does not match checkpoint");
  const auto alphabet = meta.at("alphabet").get<std::vector<long long>>();

  std::ifstream bin(index_dir / "index_embeddings.bin", std::ios::binary);
  if (!bin) throw FormatError("missing index_embeddings.bin");
  char magic[8];
  bin.read(magic, 8);
  if (!bin || std::memcmp(magic, kIndexMagic, 8) != 0)
    throw FormatError("not an index file");
  std::vector<std::vector<double>> table(node_count, std::vector<double>(dim));
  for (auto& row : table)
    for (auto& x : row) x = detail::read_f64_le(bin);

  TuLoadOptions keep_all{.min_component_size = 1};
  GraphDataset queries = load_tu_dataset_with_alphabet(query_dir, query_name, alphabet, keep_all);

  std::vector<QueryDecision> decisions;
  std::string per_node = "query_index,node,psi\n";
  std::string csv = "query_index,decision,max_psi,argmax_node\n";
  for (std::size_t qi = 0; qi < queries.graphs.size(); ++qi) {
    const GraphEmbedding q = encode_graph(queries.graphs[qi], ckpt.params);
    QueryDecision dec;
    dec.query_index = static_cast<int>(qi);
    dec.max_psi = -2.0;
    for (int v = 0; v < node_count; ++v) {
      const double s = psi(std::span<const double>(q.values), std::span<const double>(table[v])).psi;
      per_node += std::to_string(qi) + "," + std::to_string(v) + "," + detail::fmt_double(s) + "\n";
      if (s > dec.max_psi) {
        dec.max_psi = s;
        dec.argmax_node = v;
      }
    }
    dec.decision = dec.max_psi > tau ? 1 : 0;
    csv += std::to_string(qi) + "," + std::to_string(dec.decision) + "," +
           detail::fmt_double(dec.max_psi) + "," + std::to_string(dec.argmax_node) + "\n";
    decisions.push_back(dec);
  }
  detail::write_text(out_dir / "query_decisions.csv", csv);
  detail::write_text(out_dir / "query_node_scores.csv", per_node);
  return decisions;
}

// oracle: one pair of graphs from two TU corpora, printed verdict.
inline OracleOutcome cmd_oracle(const std::filesystem::path& query_prefix,
                                const std::filesystem::path& data_prefix,
                                std::chrono::milliseconds timeout, int query_index,
                                int data_index) {
  TuLoadOptions keep_all{.min_component_size = 1};
  GraphDataset q = load_tu_dataset(query_prefix.parent_path(), query_prefix.filename().string(),
                                   keep_all);
  GraphDataset d = load_tu_dataset(data_prefix.parent_path(), data_prefix.filename().string(),
                                   keep_all);
  unify_alphabets(q, d);
  return find_subgraph_isomorphism(q.graphs.at(query_index), d.graphs.at(data_index), timeout);
}

}  // namespace nsm
