// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "nsm/trainer.hpp"
#include "test_util.hpp"

using namespace nsm;
namespace tt = nsm::testing;
using namespace std::chrono_literals;

namespace {

// Two disjoint label alphabets: even graphs draw labels from {0,1,2}, odd ones
// from {3,4,5}. Negatives across groups are trivially unmatchable, so a tiny
// model separates the pair set quickly.
std::vector<LabeledGraph> separable_corpus(int n, Rng& rng) {
  std::vector<LabeledGraph> graphs;
  for (int i = 0; i < n; ++i) {
    Rng local = rng.child(i);
    auto g = random_connected_graph(local.uniform_int(8, 12), 3, 0.4, local);
    if (i % 2 == 1) {
      std::vector<LabelId> labels = g.labels();
      for (auto& l : labels) l += 3;
      g = LabeledGraph::from_edges(std::move(labels), g.edges());
    }
    graphs.push_back(std::move(g));
  }
  return graphs;
}

SamplerConfig test_sampler() {
  SamplerConfig cfg;
  cfg.data_walk_min = 6;
  cfg.data_walk_max = 10;
  cfg.oracle_timeout = 500ms;
  return cfg;
}

EncoderConfig tiny_encoder(CombineMode mode = CombineMode::gru) {
  EncoderConfig cfg;
  cfg.num_layers = 2;
  cfg.hidden_dim = 8;
  cfg.out_dim = 4;
  cfg.combine = mode;
  return cfg;
}

std::vector<PairExample> make_pair_set(const std::vector<LabeledGraph>& graphs,
                                       const SamplerConfig& cfg, int triplets, Rng seed_rng) {
  std::vector<PairExample> out;
  for (int i = 0; i < triplets; ++i) {
    Rng rng = seed_rng.child(i);
    const int src = static_cast<int>(rng.uniform_index(graphs.size()));
    const int n = std::min(rng.uniform_int(cfg.data_walk_min, cfg.data_walk_max),
                           graphs[src].node_count());
    LabeledGraph data = random_walk_sample(graphs[src], n, rng);
    PairExample pos;
    pos.query = sample_positive(data, cfg, rng);
    pos.data = data;
    pos.label = 1;
    out.push_back(pos);
    auto neg = sample_negative(data, graphs, cfg, rng, src);
    if (neg) {
      PairExample ne;
      ne.query = std::move(*neg);
      ne.data = std::move(data);
      ne.label = 0;
      ne.provenance = PairProvenance::negative_verified;
      out.push_back(std::move(ne));
    }
  }
  return out;
}

}  // namespace

TEST(MseLoss, HandValues) {
  ad::Tape t;
  {
    std::vector<ad::Tensor> scores{t.scalar(0.5)};
    std::vector<double> targets{1.0};
    EXPECT_DOUBLE_EQ(t.scalar_value(mse_loss(t, scores, targets)), 0.25);
  }
  {
    std::vector<ad::Tensor> scores{t.scalar(0.7)};
    std::vector<double> targets{0.7};
    EXPECT_DOUBLE_EQ(t.scalar_value(mse_loss(t, scores, targets)), 0.0);
  }
  {
    std::vector<ad::Tensor> scores{t.scalar(0.5), t.scalar(-0.5)};
    std::vector<double> targets{1.0, -1.0};
    EXPECT_DOUBLE_EQ(t.scalar_value(mse_loss(t, scores, targets)), 0.25);
  }
  std::vector<ad::Tensor> empty;
  std::vector<double> none;
  EXPECT_THROW(mse_loss(t, empty, none), std::invalid_argument);
}

TEST(Train, ZeroLearningRateLeavesParamsUntouched) {
  Rng rng(21);
  auto graphs = separable_corpus(8, rng);
  auto val = make_pair_set(graphs, test_sampler(), 6, rng.child(999));

  TrainConfig cfg;
  cfg.lr = 0.0;
  cfg.batch_size = 4;
  cfg.iters_per_epoch = 2;
  cfg.warmup_epochs = 0;
  cfg.max_epochs = 2;
  cfg.patience = 10;

  auto init = init_params(tiny_encoder(), 6, 17);
  auto result = train(graphs, val, cfg, tiny_encoder(), test_sampler(), 6, 17, &init);
  for (int i = 0; i < init.store.size(); ++i)
    EXPECT_EQ(result.checkpoint.params.store.at(i).value, init.store.at(i).value);
}

TEST(Train, SeparableCorpusReachesHighAurocWithinFiveEpochs) {
  Rng rng(22);
  auto graphs = separable_corpus(16, rng);
  auto val = make_pair_set(graphs, test_sampler(), 24, rng.child(999));

  TrainConfig cfg;
  cfg.lr = 1e-3;
  cfg.batch_size = 8;
  cfg.iters_per_epoch = 10;
  cfg.warmup_epochs = 0;
  cfg.max_epochs = 5;
  cfg.patience = 50;

  auto result = train(graphs, val, cfg, tiny_encoder(), test_sampler(), 6, 4);
  EXPECT_GE(result.best_val_auroc, 0.95) << "best epoch " << result.best_epoch;
  EXPECT_GT(result.checkpoint.tau, -1.0);
  EXPECT_LE(result.checkpoint.tau, 1.0);
}

TEST(Train, IdenticalSeedsGiveIdenticalLogs) {
  Rng rng(23);
  auto graphs = separable_corpus(8, rng);
  auto val = make_pair_set(graphs, test_sampler(), 6, rng.child(999));

  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.iters_per_epoch = 3;
  cfg.warmup_epochs = 1;
  cfg.max_epochs = 3;

  auto a = train(graphs, val, cfg, tiny_encoder(), test_sampler(), 6, 5);
  auto b = train(graphs, val, cfg, tiny_encoder(), test_sampler(), 6, 5);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].loss, b.log[i].loss);
    EXPECT_EQ(a.log[i].val_auroc.has_value(), b.log[i].val_auroc.has_value());
    if (a.log[i].val_auroc) {
      EXPECT_EQ(*a.log[i].val_auroc, *b.log[i].val_auroc);
    }
  }
  EXPECT_EQ(a.checkpoint.tau, b.checkpoint.tau);
}

TEST(Train, LossDecreasesOnFixedBatch) {
  Rng rng(24);
  auto graphs = separable_corpus(8, rng);
  SamplerConfig scfg = test_sampler();
  Rng batch_rng(555);
  auto batch = sample_triplet_batch(graphs, scfg, batch_rng, 6);
  ASSERT_GT(batch.triplets.size(), 2u);

  auto params = init_params(tiny_encoder(), 6, 9);
  ad::AdamState adam(params.store, {.lr = 1e-3});
  std::vector<double> losses;
  for (int step = 0; step < 10; ++step) {
    ad::Tape tape;
    auto leafs = leaf_params(tape, params);
    std::vector<ad::Tensor> scores;
    std::vector<double> targets;
    for (const auto& tri : batch.triplets) {
      auto d = encode_on_tape(tape, tri.data, leafs, params.config);
      auto p = encode_on_tape(tape, tri.positive, leafs, params.config);
      auto n = encode_on_tape(tape, tri.negative, leafs, params.config);
      scores.push_back(psi_on_tape(tape, p.graph_embedding, d.graph_embedding));
      targets.push_back(1.0);
      scores.push_back(psi_on_tape(tape, n.graph_embedding, d.graph_embedding));
      targets.push_back(-1.0);
    }
    auto loss = mse_loss(tape, scores, targets);
    losses.push_back(tape.scalar_value(loss));
    tape.backward(loss, params.store);
    ad::adam_step(params.store, adam);
  }
  EXPECT_LT(losses.back(), losses.front());
}

TEST(RankQueries, DegenerateAndTwoElementChains) {
  auto params = init_params(tiny_encoder(), 2, 3);
  auto d = tt::path_graph({0, 1, 0, 1, 0, 1});

  SamplerConfig scfg = test_sampler();
  Rng rng(25);
  auto chain1 = build_nested_chain(d, 1, scfg, rng);
  auto r1 = rank_queries(d, chain1, params, ScorerMode::psi_full);
  EXPECT_TRUE(r1.degenerate);
  EXPECT_DOUBLE_EQ(r1.rho, 1.0);

  auto chain2 = build_nested_chain(d, 2, scfg, rng);
  ASSERT_EQ(chain2.size(), 2u);
  auto r2 = rank_queries(d, chain2, params, ScorerMode::sdr_only);
  EXPECT_FALSE(r2.degenerate);
  EXPECT_TRUE(r2.rho == 1.0 || r2.rho == -1.0);
}

TEST(Train, AbortsWhenNegativeSamplerStarves) {
  // identical graphs admit no unmatchable query, so every negative slot fails
  Rng rng(31);
  auto g = random_connected_graph(10, 2, 0.5, rng);
  std::vector<LabeledGraph> graphs(6, g);
  std::vector<PairExample> val(2);
  val[0] = {g, g, 1, PairProvenance::positive_by_construction};
  val[1] = {tt::triangle(1, 1, 1), g, 0, PairProvenance::negative_verified};

  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.iters_per_epoch = 1;
  cfg.warmup_epochs = 0;
  cfg.max_epochs = 1;
  SamplerConfig scfg = test_sampler();
  scfg.negative_retry_cap = 3;
  EXPECT_THROW(train(graphs, val, cfg, tiny_encoder(), scfg, 2, 1), std::runtime_error);
}

TEST(ValidationAuroc, RequiresBothClasses) {
  auto params = init_params(tiny_encoder(), 2, 3);
  std::vector<PairExample> only_pos(1);
  only_pos[0].query = tt::triangle();
  only_pos[0].data = tt::triangle();
  only_pos[0].label = 1;
  EXPECT_THROW(validation_auroc(only_pos, params), std::invalid_argument);
}
