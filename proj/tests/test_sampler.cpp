// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <set>

#include "nsm/sampler.hpp"
#include "test_util.hpp"

using namespace nsm;
namespace tt = nsm::testing;
using namespace std::chrono_literals;

namespace {

SamplerConfig desk_sampler() {
  SamplerConfig cfg;
  cfg.data_walk_min = 5;
  cfg.data_walk_max = 12;
  cfg.oracle_timeout = 500ms;
  return cfg;
}

}  // namespace

TEST(RandomWalk, SingleNode) {
  Rng rng(1);
  auto g = tt::cycle_graph(6);
  auto w = random_walk_sample(g, 1, rng);
  EXPECT_EQ(w.node_count(), 1);
  EXPECT_EQ(w.edge_count(), 0);
}

TEST(RandomWalk, FullWalkRecoversConnectedGraph) {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    Rng local = rng.child(trial);
    auto g = random_connected_graph(9, 2, 0.5, local);
    auto w = random_walk_sample(g, 9, local);
    EXPECT_TRUE(w == g);  // visiting everything induces the whole graph
  }
}

TEST(RandomWalk, StarAlwaysKeepsHub) {
  auto star = tt::star_graph(5);
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    Rng local = rng.child(trial);
    auto w = random_walk_sample(star, 3, local);
    EXPECT_EQ(w.node_count(), 3);
    EXPECT_EQ(w.edge_count(), 2);
    // the hub is the only node that can have degree 2 in any 3-node sample
    int max_deg = 0;
    for (NodeId v = 0; v < w.node_count(); ++v) max_deg = std::max(max_deg, w.degree(v));
    EXPECT_EQ(max_deg, 2);
  }
}

TEST(RandomWalk, ResultIsConnected) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    Rng local = rng.child(trial);
    auto g = random_connected_graph(local.uniform_int(2, 20), 3, 0.4, local);
    auto w = random_walk_sample(g, local.uniform_int(1, g.node_count()), local);
    EXPECT_TRUE(w.is_connected());
  }
}

TEST(SamplePositive, FullFractionYieldsWholeGraph) {
  SamplerConfig cfg = desk_sampler();
  cfg.query_fraction_min = cfg.query_fraction_max = 1.0;
  Rng rng(5);
  auto d = random_connected_graph(8, 2, 0.5, rng);
  auto q = sample_positive(d, cfg, rng);
  EXPECT_TRUE(q == d);
}

TEST(SamplePositive, AlwaysOracleMatch) {
  SamplerConfig cfg = desk_sampler();
  Rng rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    Rng local = rng.child(trial);
    auto d = random_connected_graph(local.uniform_int(4, 14), 3, 0.5, local);
    auto q = sample_positive(d, cfg, local);
    auto out = find_subgraph_isomorphism(q, d, cfg.oracle_timeout);
    ASSERT_EQ(out.verdict, Verdict::match) << "trial " << trial;
  }
}

TEST(SamplePositive, MinimalFractionGivesSingleNodeWithPresentLabel) {
  SamplerConfig cfg = desk_sampler();
  cfg.query_fraction_min = cfg.query_fraction_max = 1e-9;
  Rng rng(7);
  auto d = tt::path_graph({0, 1, 2, 1});
  auto q = sample_positive(d, cfg, rng);
  EXPECT_EQ(q.node_count(), 1);
  bool present = false;
  for (NodeId v = 0; v < d.node_count(); ++v) present |= (d.label(v) == q.label(0));
  EXPECT_TRUE(present);
}

TEST(SampleNegative, LabelDisjointDonorIsFastAccept) {
  SamplerConfig cfg = desk_sampler();
  Rng rng(8);
  auto d = tt::triangle(0, 0, 0);
  std::vector<LabeledGraph> corpus{d, tt::triangle(1, 1, 1)};
  auto neg = sample_negative(d, corpus, cfg, rng, 0);
  ASSERT_TRUE(neg.has_value());
  for (NodeId v = 0; v < neg->node_count(); ++v) EXPECT_EQ(neg->label(v), 1);
}

TEST(SampleNegative, AcceptedNegativesVerifyByBruteForce) {
  SamplerConfig cfg = desk_sampler();
  cfg.data_walk_min = 4;
  cfg.data_walk_max = 8;
  Rng rng(9);
  std::vector<LabeledGraph> corpus;
  for (int i = 0; i < 12; ++i) {
    Rng local = rng.child(1000 + i);
    corpus.push_back(random_connected_graph(local.uniform_int(4, 8), 2, 0.5, local));
  }
  int accepted = 0;
  for (int trial = 0; trial < 200 && accepted < 120; ++trial) {
    Rng local = rng.child(trial);
    const int src = static_cast<int>(local.uniform_index(corpus.size()));
    auto d = random_walk_sample(corpus[src], std::min(8, corpus[src].node_count()), local);
    auto neg = sample_negative(d, corpus, cfg, local, src);
    if (!neg) continue;
    ++accepted;
    EXPECT_FALSE(tt::brute_force_subgraph_iso(*neg, d)) << "trial " << trial;
  }
  EXPECT_GT(accepted, 30);
}

TEST(SampleNegative, IdenticalCorpusAlwaysFails) {
  SamplerConfig cfg = desk_sampler();
  cfg.query_fraction_min = 0.2;
  Rng rng(10);
  auto g = tt::cycle_graph(8);
  std::vector<LabeledGraph> corpus{g, g, g};
  auto neg = sample_negative(g, corpus, cfg, rng, 0);
  EXPECT_FALSE(neg.has_value());
}

TEST(BuildSplit, PaperArithmetic) {
  auto s = build_split(100, 42);
  EXPECT_EQ(s.train.size(), 64u);
  EXPECT_EQ(s.val.size(), 16u);
  EXPECT_EQ(s.test.size(), 20u);

  auto tiny = build_split(5, 42);
  EXPECT_EQ(tiny.train.size(), 3u);
  EXPECT_EQ(tiny.val.size(), 1u);
  EXPECT_EQ(tiny.test.size(), 1u);
}

TEST(BuildSplit, DeterministicDisjointExhaustive) {
  auto a = build_split(37, 7);
  auto b = build_split(37, 7);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.val, b.val);
  EXPECT_EQ(a.test, b.test);

  std::set<int> seen;
  for (const auto* part : {&a.train, &a.val, &a.test})
    for (int i : *part) EXPECT_TRUE(seen.insert(i).second);
  EXPECT_EQ(seen.size(), 37u);

  auto c = build_split(37, 8);
  EXPECT_NE(a.train, c.train);
}

TEST(NestedChain, StrictlyDecreasingAndOracleConsistent) {
  SamplerConfig cfg = desk_sampler();
  Rng rng(11);
  auto d = random_connected_graph(20, 2, 0.5, rng);
  auto chain = build_nested_chain(d, 4, cfg, rng);
  ASSERT_GE(chain.size(), 2u);
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    EXPECT_GT(chain[i].node_count(), chain[i + 1].node_count());
    auto out = find_subgraph_isomorphism(chain[i + 1], chain[i], cfg.oracle_timeout);
    EXPECT_EQ(out.verdict, Verdict::match);  // transitive nesting
  }
  for (const auto& q : chain) {
    auto out = find_subgraph_isomorphism(q, d, cfg.oracle_timeout);
    EXPECT_EQ(out.verdict, Verdict::match);
  }
}

TEST(NestedChain, LengthTwoOnPath) {
  SamplerConfig cfg = desk_sampler();
  Rng rng(12);
  auto d = tt::path_graph({0, 1, 0, 1, 0, 1, 0, 1, 0, 1});
  auto chain = build_nested_chain(d, 2, cfg, rng);
  ASSERT_EQ(chain.size(), 2u);
  EXPECT_GT(chain[0].node_count(), chain[1].node_count());
  EXPECT_GE(chain[1].node_count(), 1);
}

TEST(NestedChain, SingleAndTooSmall) {
  SamplerConfig cfg = desk_sampler();
  Rng rng(13);
  auto d = tt::path_graph({0, 1, 0});
  auto one = build_nested_chain(d, 1, cfg, rng);
  EXPECT_EQ(one.size(), 1u);
  // asking for more members than the graph can nest yields a shorter chain
  auto chain = build_nested_chain(tt::path_graph({0, 1}), 6, cfg, rng);
  EXPECT_LT(chain.size(), 6u);
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    EXPECT_GT(chain[i].node_count(), chain[i + 1].node_count());
}

TEST(TripletBatch, AllMembersVerify) {
  SamplerConfig cfg = desk_sampler();
  cfg.data_walk_min = 4;
  cfg.data_walk_max = 8;
  Rng rng(14);
  std::vector<LabeledGraph> graphs;
  for (int i = 0; i < 10; ++i) {
    Rng local = rng.child(i);
    graphs.push_back(random_connected_graph(local.uniform_int(5, 9), 2, 0.5, local));
  }
  auto batch = sample_triplet_batch(graphs, cfg, rng, 16);
  EXPECT_GT(batch.triplets.size(), 0u);
  for (const auto& tri : batch.triplets) {
    EXPECT_EQ(find_subgraph_isomorphism(tri.positive, tri.data, cfg.oracle_timeout).verdict,
              Verdict::match);
    EXPECT_EQ(find_subgraph_isomorphism(tri.negative, tri.data, cfg.oracle_timeout).verdict,
              Verdict::no_match);
  }
}

TEST(Sampler, SeededDeterminism) {
  SamplerConfig cfg = desk_sampler();
  auto run = [&]() {
    Rng rng(909);
    std::vector<LabeledGraph> graphs;
    for (int i = 0; i < 6; ++i) {
      Rng local = rng.child(i);
      graphs.push_back(random_connected_graph(10, 3, 0.4, local));
    }
    return sample_triplet_batch(graphs, cfg, rng, 8);
  };
  auto a = run();
  auto b = run();
  ASSERT_EQ(a.triplets.size(), b.triplets.size());
  for (std::size_t i = 0; i < a.triplets.size(); ++i) {
    EXPECT_TRUE(a.triplets[i].data == b.triplets[i].data);
    EXPECT_TRUE(a.triplets[i].positive == b.triplets[i].positive);
    EXPECT_TRUE(a.triplets[i].negative == b.triplets[i].negative);
  }
}
