// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <optional>

#include "nsm/checkpoint.hpp"
#include "nsm/encoder.hpp"
#include "nsm/measure.hpp"
#include "nsm/metrics.hpp"
#include "nsm/optim.hpp"
#include "nsm/sampler.hpp"

namespace nsm {

struct TrainConfig {
  double lr = 1e-3;
  int batch_size = 64;       // triplets per iteration
  int iters_per_epoch = 100;
  int warmup_epochs = 10;    // no validation during warm-up
  int patience = 50;         // validations without improvement before stopping
  int max_epochs = 100;
  double target_pos = 1.0;
  double target_neg = -1.0;

  void validate() const {
    if (batch_size < 1 || iters_per_epoch < 1 || max_epochs < 1)
      throw std::invalid_argument("TrainConfig: sizes must be >= 1");
    if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
    if (warmup_epochs < 0) throw std::invalid_argument("TrainConfig: warmup must be >= 0");
    if (target_pos < -1.0 || target_pos > 1.0 || target_neg < -1.0 || target_neg > 1.0)
      throw std::invalid_argument("TrainConfig: targets must lie in [-1, 1]");
  }
};

// Mean squared error between predicted scores and targets, differentiable.
inline ad::Tensor mse_loss(ad::Tape& t, std::span<const ad::Tensor> scores,
                           std::span<const double> targets) {
  if (scores.empty() || scores.size() != targets.size())
    throw std::invalid_argument("mse_loss: need matching nonempty scores and targets");
  ad::Tensor acc;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    ad::Tensor diff = ad::add_scalar(t, scores[i], -targets[i]);
    ad::Tensor sq = ad::multiply(t, diff, diff);
    acc = (i == 0) ? sq : ad::add(t, acc, sq);
  }
  return ad::scale(t, acc, 1.0 / static_cast<double>(scores.size()));
}

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;
  std::optional<double> val_auroc;  // absent during warm-up
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_auroc = 0.0;
};

namespace detail {

// psi of every pair in the set under the given parameters, with labels.
inline void score_pair_set(const std::vector<PairExample>& pairs, const EncoderParams& params,
                           std::vector<double>& pos, std::vector<double>& neg) {
  pos.clear();
  neg.clear();
  for (const auto& p : pairs) {
    const auto q = encode_graph(p.query, params);
    const auto d = encode_graph(p.data, params);
    const double score = psi(q, d).psi;
    (p.label == 1 ? pos : neg).push_back(score);
  }
}

}  // namespace detail

inline double validation_auroc(const std::vector<PairExample>& val_set,
                               const EncoderParams& params) {
  std::vector<double> pos, neg;
  detail::score_pair_set(val_set, params, pos, neg);
  if (pos.empty() || neg.empty())
    throw std::invalid_argument("validation set needs both labels present");
  return auroc(pos, neg);
}

// MSE training on on-the-fly triplet batches with warm-up, per-epoch
// validation AUROC, best-checkpoint keeping, and early stopping. The returned
// threshold is calibrated on the validation scores of the best parameters.
inline TrainResult train(const std::vector<LabeledGraph>& train_graphs,
                         const std::vector<PairExample>& val_set, const TrainConfig& cfg,
                         const EncoderConfig& encoder_cfg, const SamplerConfig& sampler_cfg,
                         int label_alphabet_size, std::uint64_t seed,
                         const EncoderParams* init = nullptr) {
  cfg.validate();
  encoder_cfg.validate();
  sampler_cfg.validate();
  if (train_graphs.empty()) throw std::invalid_argument("train: empty training corpus");

  EncoderParams params = init ? *init : init_params(encoder_cfg, label_alphabet_size, seed);
  if (params.config.hidden_dim != encoder_cfg.hidden_dim ||
      params.config.out_dim != encoder_cfg.out_dim ||
      params.config.num_layers != encoder_cfg.num_layers)
    throw std::invalid_argument("train: initial checkpoint does not match encoder config");

  ad::AdamState adam(params.store, {.lr = cfg.lr});
  TrainResult result;
  EncoderParams best = params;
  double best_auroc = -std::numeric_limits<double>::infinity();
  int best_epoch = 0, stale = 0;
  Rng batch_seeds(splitmix64(seed ^ 0x7a17b4c8ULL));

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    for (int iter = 0; iter < cfg.iters_per_epoch; ++iter) {
      Rng rng = batch_seeds.child(static_cast<std::uint64_t>(epoch) * 1'000'003ULL + iter);
      TripletBatch batch = sample_triplet_batch(train_graphs, sampler_cfg, rng, cfg.batch_size);
      if (batch.failed_slots * 2 > cfg.batch_size)
        throw std::runtime_error(
            "train: negative sampler failed for more than half of the batch (" +
            std::to_string(batch.failed_slots) + "/" + std::to_string(cfg.batch_size) +
            " slots); corpus likely lacks unmatchable queries");
      if (batch.triplets.empty()) continue;

      ad::Tape tape;
      auto leafs = leaf_params(tape, params);
      std::vector<ad::Tensor> scores;
      std::vector<double> targets;
      for (const auto& tri : batch.triplets) {
        auto d_act = encode_on_tape(tape, tri.data, leafs, params.config);
        auto p_act = encode_on_tape(tape, tri.positive, leafs, params.config);
        auto n_act = encode_on_tape(tape, tri.negative, leafs, params.config);
        scores.push_back(psi_on_tape(tape, p_act.graph_embedding, d_act.graph_embedding));
        targets.push_back(cfg.target_pos);
        scores.push_back(psi_on_tape(tape, n_act.graph_embedding, d_act.graph_embedding));
        targets.push_back(cfg.target_neg);
      }
      ad::Tensor loss = mse_loss(tape, scores, targets);
      loss_sum += tape.scalar_value(loss);
      if (cfg.lr != 0.0) {
        tape.backward(loss, params.store);
        ad::adam_step(params.store, adam);
      }
    }

    EpochLog row;
    row.epoch = epoch;
    row.loss = loss_sum / cfg.iters_per_epoch;
    if (epoch > cfg.warmup_epochs) {
      const double va = validation_auroc(val_set, params);
      row.val_auroc = va;
      if (va > best_auroc) {
        best_auroc = va;
        best = params;
        best_epoch = epoch;
        stale = 0;
      } else {
        ++stale;
      }
    }
    result.log.push_back(row);
    if (row.val_auroc && stale >= cfg.patience) break;
  }

  if (best_epoch == 0) {  // never validated (all warm-up); keep the last state
    best = params;
    best_epoch = static_cast<int>(result.log.size());
    best_auroc = validation_auroc(val_set, best);
  }

  // Calibrate tau on the validation scores of the best parameters.
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& p : val_set) {
    const auto q = encode_graph(p.query, best);
    const auto d = encode_graph(p.data, best);
    scores.push_back(psi(q, d).psi);
    labels.push_back(p.label);
  }
  const Threshold th = calibrate_threshold(scores, labels);

  result.checkpoint.params = std::move(best);
  result.checkpoint.tau = th.tau;
  result.best_epoch = best_epoch;
  result.best_val_auroc = best_auroc;
  return result;
}

enum class ScorerMode { psi_full, sdr_only, compliance_only };

inline const char* scorer_mode_name(ScorerMode m) {
  switch (m) {
    case ScorerMode::psi_full: return "psi";
    case ScorerMode::sdr_only: return "sdr_only";
    default: return "compliance_only";
  }
}

struct RankingOutcome {
  std::vector<double> scores;   // per chain member, chain order
  double rho = 0.0;
  bool degenerate = false;      // chain of length 1: rho = 1.0 by convention
};

// Scores each chain member against d with the selected scorer and correlates
// with the node-count-descending ground truth.
inline RankingOutcome rank_queries(const LabeledGraph& d, const std::vector<LabeledGraph>& chain,
                                   const EncoderParams& params, ScorerMode mode) {
  if (chain.empty()) throw std::invalid_argument("rank_queries: empty chain");
  RankingOutcome out;
  const GraphEmbedding d_emb = encode_graph(d, params);
  std::vector<double> truth;
  for (const auto& q : chain) {
    const GraphEmbedding q_emb = encode_graph(q, params);
    const ScoreBreakdown s = psi(q_emb, d_emb);
    switch (mode) {
      case ScorerMode::psi_full: out.scores.push_back(s.psi); break;
      case ScorerMode::sdr_only: out.scores.push_back(s.sdr); break;
      case ScorerMode::compliance_only: out.scores.push_back(s.compliance); break;
    }
    truth.push_back(static_cast<double>(q.node_count()));
  }
  if (chain.size() == 1) {
    out.rho = 1.0;
    out.degenerate = true;
  } else {
    out.rho = spearman_rho(out.scores, truth);
  }
  return out;
}

}  // namespace nsm
