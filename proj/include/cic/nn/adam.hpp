#pragma once

#include <cstdint>

#include "cic/nn/mlp.hpp"

namespace cic::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moment buffers mirror the parameter shapes of the network they serve.
struct AdamState {
  AdamState() = default;
  explicit AdamState(const Mlp& params, const AdamConfig& config = {});

  std::vector<Dense> m;
  std::vector<Dense> v;
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam step applied to params in place. Throws
// TrainingError (carrying the would-be step index) on non-finite grads.
void adam_step(Mlp& params, const Gradients& grads, AdamState& state, double lr);

}  // namespace cic::nn
