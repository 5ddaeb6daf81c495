// SPDX-License-Identifier: Apache-2.0
//
// Batch frontend for the subgraph-matching pipeline: corpus/pair sampling,
// training, evaluation, ranking, node alignment, large-graph indexing, and
// direct oracle queries.

#include <iostream>

#include <CLI11.hpp>

#include "nsm/commands.hpp"
#include "nsm/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = ".";
  int threads = 1;
  int timeout_ms = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON run configuration");
  cmd->add_option("--seed", args.seed, "override the config seed")
      ->each([&](const std::string&) { args.seed_set = true; });
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--threads", args.threads, "worker thread cap")->check(CLI::PositiveNumber);
  cmd->add_option("--timeout-ms", args.timeout_ms, "oracle timeout override (ms)");
}

nsm::RunConfig resolve_config(const CommonArgs& args) {
  nsm::RunConfig cfg;
  if (!args.config_path.empty()) cfg = nsm::load_run_config(args.config_path);
  if (args.seed_set) cfg.seed = args.seed;
  if (args.timeout_ms > 0) cfg.sampler.oracle_timeout = std::chrono::milliseconds(args.timeout_ms);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"neural subgraph matching pipeline"};
  app.set_version_flag("--version", nsm::kVersion);
  app.require_subcommand(1);

  CommonArgs sample_args, train_args, eval_args, rank_args, align_args, index_args, query_args;

  auto* sample = app.add_subcommand("sample", "generate base corpus, splits and offline pair sets");
  add_common(sample, sample_args);

  auto* train = app.add_subcommand("train", "train an encoder on the sampled corpus");
  add_common(train, train_args);
  std::string train_data;
  train->add_option("--data", train_data, "directory written by `sample`")->required();

  auto* eval = app.add_subcommand("eval", "score an offline pair set with a checkpoint");
  add_common(eval, eval_args);
  std::string eval_ckpt, eval_data, eval_split = "test";
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
  eval->add_option("--data", eval_data, "directory written by `sample`")->required();
  eval->add_option("--split", eval_split, "pair set name (val|test)");

  auto* rank = app.add_subcommand("rank", "rank nested query chains with psi/sdr/compliance");
  add_common(rank, rank_args);
  std::string rank_ckpt, rank_data;
  rank->add_option("--checkpoint", rank_ckpt)->required();
  rank->add_option("--data", rank_data)->required();

  auto* align = app.add_subcommand("align", "node-level Hit@K against oracle mappings");
  add_common(align, align_args);
  std::string align_ckpt, align_data, align_split = "test";
  align->add_option("--checkpoint", align_ckpt)->required();
  align->add_option("--data", align_data)->required();
  align->add_option("--split", align_split, "pair set name (val|test)");

  auto* index = app.add_subcommand("index", "embed every node's k-hop neighborhood of a graph");
  add_common(index, index_args);
  std::string index_ckpt, index_graph;
  int index_k = 0, index_graph_idx = 0;
  index->add_option("--checkpoint", index_ckpt)->required();
  index->add_option("--graph", index_graph, "TU corpus prefix (dir/name)")->required();
  index->add_option("--graph-index", index_graph_idx, "graph position in the corpus");
  index->add_option("-k,--k", index_k, "neighborhood radius (default: encoder depth)");

  auto* query = app.add_subcommand("query", "match queries against a persisted index");
  add_common(query, query_args);
  std::string query_ckpt, query_index_dir, query_corpus;
  query->add_option("--checkpoint", query_ckpt)->required();
  query->add_option("--index", query_index_dir, "directory written by `index`")->required();
  query->add_option("--queries", query_corpus, "TU corpus prefix (dir/name)")->required();

  auto* oracle = app.add_subcommand("oracle", "exact subgraph-isomorphism verdict for one pair");
  std::string oracle_q, oracle_d;
  int oracle_timeout_ms = 1000, oracle_qi = 0, oracle_di = 0;
  oracle->add_option("query", oracle_q, "query TU corpus prefix (dir/name)")->required();
  oracle->add_option("data", oracle_d, "data TU corpus prefix (dir/name)")->required();
  oracle->add_option("--timeout-ms", oracle_timeout_ms);
  oracle->add_option("--q-index", oracle_qi);
  oracle->add_option("--d-index", oracle_di);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sample->parsed()) {
      nsm::cmd_sample(resolve_config(sample_args), sample_args.out_dir);
    } else if (train->parsed()) {
      nsm::cmd_train(resolve_config(train_args), train_data, train_args.out_dir);
    } else if (eval->parsed()) {
      nsm::cmd_eval(resolve_config(eval_args), eval_ckpt, eval_data, eval_split,
                    eval_args.out_dir, eval_args.threads);
    } else if (rank->parsed()) {
      nsm::cmd_rank(resolve_config(rank_args), rank_ckpt, rank_data, rank_args.out_dir);
    } else if (align->parsed()) {
      nsm::cmd_align(resolve_config(align_args), align_ckpt, align_data, align_split,
                     align_args.out_dir);
    } else if (index->parsed()) {
      nsm::RunConfig cfg = resolve_config(index_args);
      const int k = index_k > 0 ? index_k : cfg.encoder.num_layers;
      std::filesystem::path prefix(index_graph);
      nsm::cmd_index(cfg, index_ckpt, prefix.parent_path(), prefix.filename().string(),
                     index_graph_idx, k, index_args.out_dir);
    } else if (query->parsed()) {
      std::filesystem::path prefix(query_corpus);
      const auto decisions = nsm::cmd_query(query_ckpt, query_index_dir, prefix.parent_path(),
                                            prefix.filename().string(), query_args.out_dir);
      for (const auto& d : decisions)
        std::cout << d.query_index << " " << d.decision << " " << d.max_psi << "\n";
    } else if (oracle->parsed()) {
      nsm::OracleOutcome outcome;
      try {
        outcome = nsm::cmd_oracle(oracle_q, oracle_d,
                                  std::chrono::milliseconds(oracle_timeout_ms), oracle_qi,
                                  oracle_di);
      } catch (const nsm::FormatError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
      }
      switch (outcome.verdict) {
        case nsm::Verdict::match: {
          std::cout << "Match";
          for (std::size_t v = 0; v < outcome.mapping.to_data.size(); ++v)
            std::cout << " " << v << "->" << outcome.mapping.to_data[v];
          std::cout << "\n";
          return 0;
        }
        case nsm::Verdict::no_match:
          std::cout << "NoMatch\n";
          return 1;
        case nsm::Verdict::timeout:
          std::cout << "Timeout\n";
          return 2;
      }
    }
  } catch (const nsm::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
