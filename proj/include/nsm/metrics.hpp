// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "nsm/isomorphism.hpp"
#include "nsm/measure.hpp"

namespace nsm {

namespace detail {

// Average ranks (1-based) with ties sharing their mean rank.
inline std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = 0.5 * ((i + 1) + (j + 1));
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace detail

// Mann-Whitney statistic: the mean over all (positive, negative) pairs of
// [p > n] + 0.5 [p = n], computed through average ranks.
inline double auroc(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty())
    throw std::invalid_argument("auroc: both score sets must be nonempty");
  std::vector<double> all(pos.begin(), pos.end());
  all.insert(all.end(), neg.begin(), neg.end());
  const auto ranks = detail::average_ranks(all);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) rank_sum += ranks[i];
  const double p = static_cast<double>(pos.size()), n = static_cast<double>(neg.size());
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

// rho = 1 - 6 sum d_i^2 / (n (n^2 - 1)) over average ranks of both lists.
inline double spearman_rho(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size() || predicted.size() < 2)
    throw std::invalid_argument("spearman_rho: need two lists of equal length >= 2");
  const auto rp = detail::average_ranks(predicted);
  const auto rt = detail::average_ranks(truth);
  double d2 = 0.0;
  for (std::size_t i = 0; i < rp.size(); ++i) d2 += (rp[i] - rt[i]) * (rp[i] - rt[i]);
  const double n = static_cast<double>(rp.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

struct Threshold {
  double tau = 0.0;
  double accuracy = 0.0;  // validation accuracy attained at tau
};

// Sweeps candidate thresholds (midpoints between adjacent distinct sorted
// scores plus one candidate below and one above everything); returns the tau
// maximizing accuracy of "predict 1 iff score > tau", smallest tau on ties.
inline Threshold calibrate_threshold(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw std::invalid_argument("calibrate_threshold: need matching nonempty scores and labels");
  std::vector<double> distinct(scores.begin(), scores.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> candidates;
  candidates.push_back(distinct.front() - 1.0);
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
    candidates.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  candidates.push_back(distinct.back() + 1.0);

  Threshold best{candidates.front(), -1.0};
  for (double tau : candidates) {
    int correct = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const int pred = scores[i] > tau ? 1 : 0;
      if (pred == labels[i]) ++correct;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(scores.size());
    if (acc > best.accuracy) best = {tau, acc};
  }
  return best;
}

// Fraction of query nodes whose ground-truth image ranks within the top k
// data nodes under node-level psi (descending, ties by lowest data id).
inline double hit_at_k(const std::vector<ScoreBreakdown>& node_scores, int query_nodes,
                       int data_nodes, const NodeMapping& mapping, int k) {
  if (query_nodes < 1 || data_nodes < 1 ||
      static_cast<int>(node_scores.size()) != query_nodes * data_nodes)
    throw std::invalid_argument("hit_at_k: score matrix shape mismatch");
  if (static_cast<int>(mapping.to_data.size()) != query_nodes)
    throw std::invalid_argument("hit_at_k: mapping not total over query nodes");
  if (k < 1) throw std::invalid_argument("hit_at_k: k must be >= 1");

  int hits = 0;
  std::vector<int> order(data_nodes);
  for (NodeId v = 0; v < query_nodes; ++v) {
    const ScoreBreakdown* row = node_scores.data() + static_cast<std::size_t>(v) * data_nodes;
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (row[a].psi != row[b].psi) return row[a].psi > row[b].psi;
      return a < b;
    });
    const int target = mapping.to_data[v];
    for (int i = 0; i < std::min(k, data_nodes); ++i)
      if (order[i] == target) {
        ++hits;
        break;
      }
  }
  return static_cast<double>(hits) / static_cast<double>(query_nodes);
}

}  // namespace nsm
