// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "nsm/metrics.hpp"
#include "nsm/rng.hpp"

using namespace nsm;

namespace {

// literal pairwise Mann-Whitney, the oracle for the rank-based implementation
double pairwise_auroc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double s = 0.0;
  for (double p : pos)
    for (double n : neg) s += (p > n) ? 1.0 : (p == n ? 0.5 : 0.0);
  return s / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

}  // namespace

TEST(Auroc, HandValues) {
  EXPECT_DOUBLE_EQ(auroc(std::vector<double>{0.9, 0.8}, std::vector<double>{0.1, 0.2}), 1.0);
  EXPECT_DOUBLE_EQ(auroc(std::vector<double>{0.8, 0.2}, std::vector<double>{0.6, 0.4}), 0.5);
  EXPECT_DOUBLE_EQ(auroc(std::vector<double>{0.5}, std::vector<double>{0.5}), 0.5);
  EXPECT_THROW(auroc(std::vector<double>{}, std::vector<double>{0.5}), std::invalid_argument);
}

TEST(Auroc, MatchesPairwiseOracleWithTies) {
  Rng rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    Rng local = rng.child(trial);
    std::vector<double> pos(local.uniform_int(1, 20)), neg(local.uniform_int(1, 20));
    // coarse grid forces plenty of ties
    for (auto& x : pos) x = local.uniform_int(0, 5) / 5.0;
    for (auto& x : neg) x = local.uniform_int(0, 5) / 5.0;
    EXPECT_NEAR(auroc(pos, neg), pairwise_auroc(pos, neg), 1e-12);
  }
}

TEST(Auroc, InvariantUnderMonotoneTransform) {
  Rng rng(505);
  std::vector<double> pos(15), neg(12);
  for (auto& x : pos) x = rng.uniform_real(-1, 1);
  for (auto& x : neg) x = rng.uniform_real(-1, 1);
  const double base = auroc(pos, neg);
  auto transform = [](double x) { return std::exp(3.0 * x) + 7.0; };
  for (auto& x : pos) x = transform(x);
  for (auto& x : neg) x = transform(x);
  EXPECT_NEAR(auroc(pos, neg), base, 1e-12);
}

TEST(Spearman, HandValues) {
  EXPECT_DOUBLE_EQ(spearman_rho(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}),
                   1.0);
  EXPECT_DOUBLE_EQ(spearman_rho(std::vector<double>{3, 2, 1}, std::vector<double>{10, 20, 30}),
                   -1.0);
  EXPECT_DOUBLE_EQ(spearman_rho(std::vector<double>{1, 3, 2}, std::vector<double>{1, 2, 3}), 0.5);
  EXPECT_THROW(spearman_rho(std::vector<double>{1}, std::vector<double>{1}),
               std::invalid_argument);
}

TEST(Threshold, SeparableExample) {
  std::vector<double> scores{0.9, 0.7, 0.2, 0.4};
  std::vector<int> labels{1, 1, 0, 0};
  auto th = calibrate_threshold(scores, labels);
  EXPECT_DOUBLE_EQ(th.tau, 0.55);
  EXPECT_DOUBLE_EQ(th.accuracy, 1.0);
}

TEST(Threshold, InterleavedFallsBackToSmallestCandidate) {
  // p1 < n1 < p2 < n2: no threshold beats predicting everything positive
  std::vector<double> scores{0.1, 0.3, 0.5, 0.7};
  std::vector<int> labels{1, 0, 1, 0};
  auto th = calibrate_threshold(scores, labels);
  EXPECT_DOUBLE_EQ(th.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(th.tau, 0.1 - 1.0);
}

TEST(Threshold, SinglePairMidpoint) {
  std::vector<double> scores{0.9, 0.2};
  std::vector<int> labels{1, 0};
  auto th = calibrate_threshold(scores, labels);
  EXPECT_DOUBLE_EQ(th.tau, 0.55);
  EXPECT_DOUBLE_EQ(th.accuracy, 1.0);
}

TEST(Threshold, MatchesBruteForceGrid) {
  Rng rng(606);
  for (int trial = 0; trial < 40; ++trial) {
    Rng local = rng.child(trial);
    const int n = local.uniform_int(2, 25);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
      scores[i] = local.uniform_int(0, 10) / 10.0;
      labels[i] = static_cast<int>(local.uniform_index(2));
    }
    auto th = calibrate_threshold(scores, labels);

    // oracle: accuracy of every tau on a dense grid around observed scores
    double best = 0.0;
    for (double tau = -1.5; tau <= 1.5; tau += 0.01) {
      int correct = 0;
      for (int i = 0; i < n; ++i)
        if ((scores[i] > tau ? 1 : 0) == labels[i]) ++correct;
      best = std::max(best, static_cast<double>(correct) / n);
    }
    EXPECT_NEAR(th.accuracy, best, 1e-12) << "trial " << trial;
  }
}

TEST(HitAtK, IdentityPairDistinctScores) {
  // 2 query nodes, 3 data nodes; diagonal clearly best
  std::vector<ScoreBreakdown> m(6);
  m[0].psi = 0.9; m[1].psi = 0.1; m[2].psi = 0.2;   // query 0 -> data 0
  m[3].psi = 0.1; m[4].psi = 0.8; m[5].psi = 0.2;   // query 1 -> data 1
  NodeMapping truth{{0, 1}};
  EXPECT_DOUBLE_EQ(hit_at_k(m, 2, 3, truth, 1), 1.0);
  EXPECT_DOUBLE_EQ(hit_at_k(m, 2, 3, truth, 3), 1.0);  // k = |V_D|
}

TEST(HitAtK, ConstantMatrixCountsIdTieBreak) {
  // all scores equal: the top-k lists are always data ids 0..k-1
  const int vq = 2, vd = 4, k = 2;
  std::vector<ScoreBreakdown> m(vq * vd);
  for (auto& s : m) s.psi = 0.5;

  // enumerate every injective mapping; mean hit fraction must be exactly k/vd
  std::vector<int> data_ids{0, 1, 2, 3};
  double total = 0.0;
  int count = 0;
  for (int a = 0; a < vd; ++a)
    for (int b = 0; b < vd; ++b) {
      if (a == b) continue;
      total += hit_at_k(m, vq, vd, NodeMapping{{a, b}}, k);
      ++count;
    }
  EXPECT_DOUBLE_EQ(total / count, static_cast<double>(k) / vd);
}

TEST(HitAtK, MonotoneInK) {
  Rng rng(707);
  const int vq = 4, vd = 6;
  std::vector<ScoreBreakdown> m(vq * vd);
  for (auto& s : m) s.psi = rng.uniform_real(-1, 1);
  NodeMapping truth{{2, 0, 5, 3}};
  double prev = 0.0;
  for (int k = 1; k <= vd; ++k) {
    const double h = hit_at_k(m, vq, vd, truth, k);
    EXPECT_GE(h, prev);
    prev = h;
  }
  EXPECT_DOUBLE_EQ(prev, 1.0);
}
