#include "cic/nn/adam.hpp"

#include <cmath>

#include "cic/core/errors.hpp"

namespace cic::nn {

AdamState::AdamState(const Mlp& params, const AdamConfig& config)
    : beta1(config.beta1), beta2(config.beta2), eps(config.eps) {
  for (const auto& l : params.layers()) {
    m.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  v = m;
}

namespace {

template <typename P, typename G, typename M>
void update_block(P& p, const G& g, M& m, M& v, double b1, double b2, double step_size, double c2, double eps) {
  m = b1 * m + (1.0 - b1) * g;
  v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
  p.array() -= step_size * m.array() / ((v.array() / c2).sqrt() + eps);
}

}  // namespace

void adam_step(Mlp& params, const Gradients& grads, AdamState& state, double lr) {
  const auto& pl = params.layers();
  if (grads.layers.size() != pl.size() || state.m.size() != pl.size() || state.v.size() != pl.size()) {
    throw ConfigError("adam_step: gradient/state layer count does not match parameters");
  }
  for (std::size_t i = 0; i < pl.size(); ++i) {
    if (grads.layers[i].weight.rows() != pl[i].weight.rows() || grads.layers[i].weight.cols() != pl[i].weight.cols() ||
        grads.layers[i].bias.size() != pl[i].bias.size() || state.m[i].weight.rows() != pl[i].weight.rows() ||
        state.m[i].weight.cols() != pl[i].weight.cols()) {
      throw ConfigError("adam_step: shape mismatch at layer " + std::to_string(i));
    }
  }
  if (!grads.all_finite()) throw TrainingError("non-finite gradient in adam_step", state.t + 1);

  state.t += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  const double step_size = lr / c1;
  auto& layers = params.mutable_layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    update_block(layers[i].weight, grads.layers[i].weight, state.m[i].weight, state.v[i].weight, state.beta1,
                 state.beta2, step_size, c2, state.eps);
    update_block(layers[i].bias, grads.layers[i].bias, state.m[i].bias, state.v[i].bias, state.beta1, state.beta2,
                 step_size, c2, state.eps);
  }
}

}  // namespace cic::nn
