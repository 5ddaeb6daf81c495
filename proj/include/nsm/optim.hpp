// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "nsm/tensor.hpp"

namespace nsm::ad {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  long long step_count = 0;
  std::vector<std::vector<double>> m, v;

  explicit AdamState(const ParamStore& store, AdamConfig cfg = {}) : config(cfg) {
    for (const auto& p : store) {
      m.emplace_back(p.value.size(), 0.0);
      v.emplace_back(p.value.size(), 0.0);
    }
  }
};

// Bias-corrected Adam update; gradients are zeroed afterwards.
inline void adam_step(ParamStore& store, AdamState& state) {
  if (static_cast<int>(state.m.size()) != store.size())
    throw std::invalid_argument("adam_step: state does not match store");
  ++state.step_count;
  const auto& c = state.config;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step_count));
  int pi = 0;
  for (auto& p : store) {
    auto& m = state.m[pi];
    auto& v = state.v[pi];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p.value[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
    ++pi;
  }
  store.zero_grad();
}

}  // namespace nsm::ad
