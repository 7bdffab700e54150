#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "cic/core/rng.hpp"
#include "cic/nn/adam.hpp"
#include "cic/nn/mlp.hpp"

namespace cic::ddpg {

using nn::Matrix;
using nn::Mlp;
using nn::Vector;

struct DdpgConfig {
  std::size_t obs_dim = 4;
  std::size_t action_dim = 2;
  std::size_t skill_dim = 16;
  std::size_t hidden_dim = 128;
  std::size_t depth = 2;
  double lr = 1e-4;
  double critic_tau = 0.01;
  double stddev = 0.2;
  double stddev_clip = 0.3;
};

// Actor concat(s, z) -> tanh action; critic concat(s, a, z) -> Q with a
// Polyak-averaged target copy.
struct ActorCritic {
  ActorCritic() = default;
  ActorCritic(const DdpgConfig& config, Rng& rng);

  DdpgConfig config;
  Mlp actor;
  Mlp critic;
  Mlp critic_target;
  nn::AdamState actor_opt;
  nn::AdamState critic_opt;
};

Matrix actor_input(const Matrix& s, const Matrix& z);
Matrix critic_input(const Matrix& s, const Matrix& a, const Matrix& z);

Matrix policy(const Mlp& actor, const Matrix& s, const Matrix& z);

// mu plus per-component noise clipped to [-clip, clip], then clamped to
// the action box.
Vector apply_exploration(const Vector& mu, const Vector& noise, double clip);

Vector act(const Mlp& actor, const Vector& s, const Vector& z, Rng& rng, bool explore, double stddev, double clip);

// y = R + discount * Q_target(s_n, pi(s_n, z), z), no bootstrap noise.
Vector bellman_targets(const Mlp& actor, const Mlp& critic_target, const Matrix& s_n, const Matrix& z,
                       const Vector& reward, const Vector& discount);

struct LossAndGrad {
  double loss = 0.0;
  nn::Gradients grad;
};

// mean (y - Q(s, a, z))^2 and its gradient w.r.t. the critic.
LossAndGrad critic_loss(const Mlp& critic, const Matrix& s, const Matrix& a, const Matrix& z, const Vector& targets);

// Q(s, a, z) per row plus dQ/da.
struct ActionValue {
  Vector q;
  Matrix dq_da;
};
using ActionValueFn = std::function<ActionValue(const Matrix& s, const Matrix& a, const Matrix& z)>;

ActionValueFn critic_action_value(const Mlp& critic);

// -mean Q(s, pi(s, z), z) and its gradient w.r.t. the actor.
LossAndGrad actor_loss(const Mlp& actor, const Matrix& s, const Matrix& z, const ActionValueFn& q);

// One Adam step on the critic loss; returns the loss. step is used only
// for error reporting.
double critic_update(ActorCritic& ac, const Matrix& s, const Matrix& a, const Matrix& z, const Vector& reward,
                     const Matrix& s_n, const Vector& discount, std::int64_t step);
// Critic parameters stay fixed.
double actor_update(ActorCritic& ac, const Matrix& s, const Matrix& z, std::int64_t step);
double actor_update(Mlp& actor, nn::AdamState& opt, double lr, const Matrix& s, const Matrix& z,
                    const ActionValueFn& q, std::int64_t step);

void target_sync(ActorCritic& ac);

}  // namespace cic::ddpg
