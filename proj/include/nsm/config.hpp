// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "nsm/encoder.hpp"
#include "nsm/measure.hpp"
#include "nsm/sampler.hpp"
#include "nsm/trainer.hpp"
#include "nsm/version.hpp"

namespace nsm {

struct SyntheticConfig {
  int num_graphs = 200;
  int min_nodes = 10;
  int max_nodes = 30;
  int num_labels = 3;
  double extra_edge_factor = 0.3;
};

struct DatasetConfig {
  std::string source = "synthetic";  // "synthetic" or "tu"
  std::string dir;                   // tu: directory holding the corpus files
  std::string name = "corpus";       // tu: file prefix; synthetic: corpus name
  int min_component_size = 3;
  SyntheticConfig synthetic;
};

struct EvalConfig {
  int val_triplets = 256;   // each triplet yields one positive and one negative pair
  int test_triplets = 512;
  std::vector<int> hit_ks = {1, 3};
  int chain_length = 5;
  int num_chains = 50;
  bool emit_timings = false;  // timings break byte-identical reruns; opt in
  SdrReduction sdr_reduction = SdrReduction::aggregate;
};

struct PathsConfig {
  std::string data_dir;
  std::string checkpoint;
  std::string init_checkpoint;  // optional warm start for train
};

struct RunConfig {
  std::uint64_t seed = 42;
  DatasetConfig dataset;
  SamplerConfig sampler;
  EncoderConfig encoder;
  TrainConfig train;
  EvalConfig eval;
  PathsConfig paths;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known,
                                const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (!known.count(key))
      throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
}

template <typename T>
inline void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  detail::reject_unknown_keys(
      j, {"seed", "dataset", "sampler", "encoder", "train", "eval", "paths"}, "top level");
  RunConfig c;
  detail::maybe(j, "seed", c.seed);

  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    detail::reject_unknown_keys(d, {"source", "dir", "name", "min_component_size", "synthetic"},
                                "dataset");
    detail::maybe(d, "source", c.dataset.source);
    detail::maybe(d, "dir", c.dataset.dir);
    detail::maybe(d, "name", c.dataset.name);
    detail::maybe(d, "min_component_size", c.dataset.min_component_size);
    if (d.contains("synthetic")) {
      const auto& s = d.at("synthetic");
      detail::reject_unknown_keys(
          s, {"num_graphs", "min_nodes", "max_nodes", "num_labels", "extra_edge_factor"},
          "dataset.synthetic");
      detail::maybe(s, "num_graphs", c.dataset.synthetic.num_graphs);
      detail::maybe(s, "min_nodes", c.dataset.synthetic.min_nodes);
      detail::maybe(s, "max_nodes", c.dataset.synthetic.max_nodes);
      detail::maybe(s, "num_labels", c.dataset.synthetic.num_labels);
      detail::maybe(s, "extra_edge_factor", c.dataset.synthetic.extra_edge_factor);
    }
    if (c.dataset.source != "synthetic" && c.dataset.source != "tu")
      throw std::invalid_argument("config: dataset.source must be 'synthetic' or 'tu'");
  }

  if (j.contains("sampler")) {
    const auto& s = j.at("sampler");
    detail::reject_unknown_keys(s,
                                {"data_walk_min", "data_walk_max", "query_fraction_min",
                                 "query_fraction_max", "negative_retry_cap", "oracle_timeout_ms",
                                 "seed"},
                                "sampler");
    detail::maybe(s, "data_walk_min", c.sampler.data_walk_min);
    detail::maybe(s, "data_walk_max", c.sampler.data_walk_max);
    detail::maybe(s, "query_fraction_min", c.sampler.query_fraction_min);
    detail::maybe(s, "query_fraction_max", c.sampler.query_fraction_max);
    detail::maybe(s, "negative_retry_cap", c.sampler.negative_retry_cap);
    detail::maybe(s, "seed", c.sampler.seed);
    if (s.contains("oracle_timeout_ms"))
      c.sampler.oracle_timeout = std::chrono::milliseconds(s.at("oracle_timeout_ms").get<int>());
    c.sampler.validate();
  }

  if (j.contains("encoder")) {
    const auto& e = j.at("encoder");
    detail::reject_unknown_keys(
        e, {"num_layers", "hidden_dim", "out_dim", "combine", "clamp_floor"}, "encoder");
    detail::maybe(e, "num_layers", c.encoder.num_layers);
    detail::maybe(e, "hidden_dim", c.encoder.hidden_dim);
    detail::maybe(e, "out_dim", c.encoder.out_dim);
    detail::maybe(e, "clamp_floor", c.encoder.clamp_floor);
    if (e.contains("combine")) {
      const std::string m = e.at("combine").get<std::string>();
      if (m == "gru") c.encoder.combine = CombineMode::gru;
      else if (m == "sum_ablation") c.encoder.combine = CombineMode::sum_ablation;
      else throw std::invalid_argument("config: encoder.combine must be gru or sum_ablation");
    }
    c.encoder.validate();
  }

  if (j.contains("train")) {
    const auto& t = j.at("train");
    detail::reject_unknown_keys(t,
                                {"lr", "batch_size", "iters_per_epoch", "warmup_epochs",
                                 "patience", "max_epochs", "target_pos", "target_neg"},
                                "train");
    detail::maybe(t, "lr", c.train.lr);
    detail::maybe(t, "batch_size", c.train.batch_size);
    detail::maybe(t, "iters_per_epoch", c.train.iters_per_epoch);
    detail::maybe(t, "warmup_epochs", c.train.warmup_epochs);
    detail::maybe(t, "patience", c.train.patience);
    detail::maybe(t, "max_epochs", c.train.max_epochs);
    detail::maybe(t, "target_pos", c.train.target_pos);
    detail::maybe(t, "target_neg", c.train.target_neg);
    c.train.validate();
  }

  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    detail::reject_unknown_keys(e,
                                {"val_triplets", "test_triplets", "hit_ks", "chain_length",
                                 "num_chains", "emit_timings", "sdr_reduction"},
                                "eval");
    detail::maybe(e, "val_triplets", c.eval.val_triplets);
    detail::maybe(e, "test_triplets", c.eval.test_triplets);
    detail::maybe(e, "hit_ks", c.eval.hit_ks);
    detail::maybe(e, "chain_length", c.eval.chain_length);
    detail::maybe(e, "num_chains", c.eval.num_chains);
    detail::maybe(e, "emit_timings", c.eval.emit_timings);
    if (e.contains("sdr_reduction")) {
      const std::string r = e.at("sdr_reduction").get<std::string>();
      if (r == "aggregate") c.eval.sdr_reduction = SdrReduction::aggregate;
      else if (r == "elementwise") c.eval.sdr_reduction = SdrReduction::elementwise;
      else throw std::invalid_argument("config: eval.sdr_reduction must be aggregate or elementwise");
    }
  }

  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    detail::reject_unknown_keys(p, {"data_dir", "checkpoint", "init_checkpoint"}, "paths");
    detail::maybe(p, "data_dir", c.paths.data_dir);
    detail::maybe(p, "checkpoint", c.paths.checkpoint);
    detail::maybe(p, "init_checkpoint", c.paths.init_checkpoint);
  }
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("missing config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config parse error in " + path.string() + ": " + e.what());
  }
  return parse_run_config(j);
}

// The fully defaulted configuration, echoed into every output artifact.
inline nlohmann::json effective_config_json(const RunConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  j["dataset"] = {{"source", c.dataset.source},
                  {"dir", c.dataset.dir},
                  {"name", c.dataset.name},
                  {"min_component_size", c.dataset.min_component_size},
                  {"synthetic",
                   {{"num_graphs", c.dataset.synthetic.num_graphs},
                    {"min_nodes", c.dataset.synthetic.min_nodes},
                    {"max_nodes", c.dataset.synthetic.max_nodes},
                    {"num_labels", c.dataset.synthetic.num_labels},
                    {"extra_edge_factor", c.dataset.synthetic.extra_edge_factor}}}};
  j["sampler"] = {{"data_walk_min", c.sampler.data_walk_min},
                  {"data_walk_max", c.sampler.data_walk_max},
                  {"query_fraction_min", c.sampler.query_fraction_min},
                  {"query_fraction_max", c.sampler.query_fraction_max},
                  {"negative_retry_cap", c.sampler.negative_retry_cap},
                  {"oracle_timeout_ms", static_cast<int>(c.sampler.oracle_timeout.count())},
                  {"seed", c.sampler.seed}};
  j["encoder"] = {{"num_layers", c.encoder.num_layers},
                  {"hidden_dim", c.encoder.hidden_dim},
                  {"out_dim", c.encoder.out_dim},
                  {"combine", combine_mode_name(c.encoder.combine)},
                  {"clamp_floor", c.encoder.clamp_floor}};
  j["train"] = {{"lr", c.train.lr},
                {"batch_size", c.train.batch_size},
                {"iters_per_epoch", c.train.iters_per_epoch},
                {"warmup_epochs", c.train.warmup_epochs},
                {"patience", c.train.patience},
                {"max_epochs", c.train.max_epochs},
                {"target_pos", c.train.target_pos},
                {"target_neg", c.train.target_neg}};
  j["eval"] = {{"val_triplets", c.eval.val_triplets},
               {"test_triplets", c.eval.test_triplets},
               {"hit_ks", c.eval.hit_ks},
               {"chain_length", c.eval.chain_length},
               {"num_chains", c.eval.num_chains},
               {"emit_timings", c.eval.emit_timings},
               {"sdr_reduction",
                c.eval.sdr_reduction == SdrReduction::aggregate ? "aggregate" : "elementwise"}};
  j["paths"] = {{"data_dir", c.paths.data_dir},
                {"checkpoint", c.paths.checkpoint},
                {"init_checkpoint", c.paths.init_checkpoint}};
  return j;
}

}  // namespace nsm
