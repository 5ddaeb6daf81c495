// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "nsm/encoder.hpp"
#include "nsm/tensor.hpp"

namespace nsm {

struct ScoreBreakdown {
  double hinge = 0.0;        // total containment violation, >= 0
  double compliance = 0.0;   // exp(-hinge), in (0,1]
  double inter_mass = 0.0;   // sum of elementwise min
  double data_mass = 0.0;    // sum of the data embedding
  double convex_mass = 0.0;  // sum of elementwise max
  double sdr = 0.0;          // similarity dominance ratio, in (-1,1]
  double psi = 0.0;          // compliance * sdr, in (-1,1]
};

namespace detail {

inline void check_same_length(std::span<const double> q, std::span<const double> d) {
  if (q.size() != d.size() || q.empty())
    throw std::invalid_argument("measure: embeddings must have equal nonzero length");
}

inline void check_divisor(double v) {
  if (std::abs(v) < ad::kDivideFloor)
    throw std::domain_error("measure: divisor below 1e-12; embeddings must be clamped upstream");
}

// sdr's contract: every coordinate must sit above the numeric floor (the
// encoder clamp guarantees 1e-7); anything below 1e-12 is an upstream bug.
inline void check_coordinates(std::span<const double> q, std::span<const double> d) {
  for (double x : q) check_divisor(x);
  for (double x : d) check_divisor(x);
}

}  // namespace detail

// Total containment violation: sum over dimensions of max(0, q - d).
inline double hinge_distance(std::span<const double> q, std::span<const double> d) {
  detail::check_same_length(q, d);
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += std::max(0.0, q[i] - d[i]);
  return s;
}

// exp(-hinge): projects [0, inf) onto (0,1] so extreme violations cannot
// distort comparisons between other pairs. exp underflows to +0 for hinge
// beyond ~745; flooring at the smallest normal double keeps the score
// strictly positive for any input.
inline double compliance_of_hinge(double hinge) {
  return std::max(std::exp(-hinge), std::numeric_limits<double>::min());
}

inline double compliance(std::span<const double> q, std::span<const double> d) {
  return compliance_of_hinge(hinge_distance(q, d));
}

enum class SdrReduction {
  aggregate,    // mass ratios, range (-1, 1]
  elementwise,  // per-dimension min/max then mean, range (0, 1]
};

// Similarity dominance ratio. The aggregate form uses the data embedding as
// the reference point: intersection mass over data mass, minus the covering
// excess normalized by the covering mass.
inline double sdr(std::span<const double> q, std::span<const double> d,
                  SdrReduction reduction = SdrReduction::aggregate) {
  detail::check_same_length(q, d);
  detail::check_coordinates(q, d);
  if (reduction == SdrReduction::elementwise) {
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double mx = std::max(q[i], d[i]);
      detail::check_divisor(mx);
      acc += std::min(q[i], d[i]) / mx;
    }
    return acc / static_cast<double>(q.size());
  }
  double inter = 0.0, data = 0.0, convex = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    inter += std::min(q[i], d[i]);
    data += d[i];
    convex += std::max(q[i], d[i]);
  }
  detail::check_divisor(data);
  detail::check_divisor(convex);
  return inter / data - (convex - data) / convex;
}

inline ScoreBreakdown psi(std::span<const double> q, std::span<const double> d,
                          SdrReduction reduction = SdrReduction::aggregate) {
  detail::check_same_length(q, d);
  detail::check_coordinates(q, d);
  ScoreBreakdown s;
  s.hinge = hinge_distance(q, d);
  s.compliance = compliance_of_hinge(s.hinge);
  for (std::size_t i = 0; i < q.size(); ++i) {
    s.inter_mass += std::min(q[i], d[i]);
    s.data_mass += d[i];
    s.convex_mass += std::max(q[i], d[i]);
  }
  detail::check_divisor(s.data_mass);
  detail::check_divisor(s.convex_mass);
  s.sdr = (reduction == SdrReduction::aggregate)
              ? s.inter_mass / s.data_mass - (s.convex_mass - s.data_mass) / s.convex_mass
              : sdr(q, d, SdrReduction::elementwise);
  s.psi = s.compliance * s.sdr;
  return s;
}

inline ScoreBreakdown psi(const GraphEmbedding& q, const GraphEmbedding& d) {
  return psi(std::span<const double>(q.values), std::span<const double>(d.values));
}

// Row-major |V_Q| x |V_D| matrix of per-node-pair breakdowns over the node
// summary vectors.
inline std::vector<ScoreBreakdown> node_pair_scores(const NodeEmbeddings& q_nodes,
                                                    const NodeEmbeddings& d_nodes) {
  if (q_nodes.out_dim != d_nodes.out_dim)
    throw std::invalid_argument("node_pair_scores: embedding widths differ");
  std::vector<ScoreBreakdown> out;
  out.reserve(static_cast<std::size_t>(q_nodes.node_count) * d_nodes.node_count);
  for (NodeId v = 0; v < q_nodes.node_count; ++v)
    for (NodeId u = 0; u < d_nodes.node_count; ++u)
      out.push_back(psi(q_nodes.summary_row(v), d_nodes.summary_row(u)));
  return out;
}

// The same score expressed as recorded tensor operations, for training.
// Numerically identical to psi() on the same inputs.
inline ad::Tensor psi_on_tape(ad::Tape& t, ad::Tensor q_emb, ad::Tensor d_emb) {
  using namespace ad;
  if (q_emb.rows != 1 || d_emb.rows != 1 || q_emb.cols != d_emb.cols)
    throw std::invalid_argument("psi_on_tape: expects matching 1 x d embeddings");
  Tensor hinge = row_sum(t, positive_part(t, subtract(t, q_emb, d_emb)));
  Tensor comp = ad::exp(t, negate(t, hinge));
  Tensor inter_mass = row_sum(t, elementwise_min(t, q_emb, d_emb));
  Tensor data_mass = row_sum(t, d_emb);
  Tensor convex_mass = row_sum(t, elementwise_max(t, q_emb, d_emb));
  Tensor sdr = subtract(t, divide(t, inter_mass, data_mass),
                        divide(t, subtract(t, convex_mass, data_mass), convex_mass));
  return multiply(t, comp, sdr);
}

}  // namespace nsm
