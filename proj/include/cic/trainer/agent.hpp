#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cic/baselines/diayn.hpp"
#include "cic/contrastive/contrastive.hpp"
#include "cic/contrastive/intrinsic_reward.hpp"
#include "cic/ddpg/ddpg.hpp"
#include "cic/entropy/particle_entropy.hpp"
#include "cic/nn/tensor_io.hpp"
#include "cic/replay/replay_buffer.hpp"
#include "cic/trainer/run_config.hpp"

namespace cic::trainer {

using nn::Matrix;
using nn::Vector;

struct UpdateMetrics {
  double intrinsic_mean = 0.0;
  double cic_loss = 0.0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
};

struct RepresentationOptimizers {
  nn::AdamState key;
  nn::AdamState skill;
  std::optional<nn::AdamState> head;
  std::vector<nn::AdamState> ensemble;
};

// Skill-conditioned DDPG with one of three intrinsic objectives:
//  cic   - particle entropy of g(tau) plus contrastive representation learning
//  apt   - the same entropy reward with no skills and frozen encoders
//  diayn - discriminator reward log q(z | s') over one-hot skills
class Agent {
 public:
  Agent(const RunConfig& config, Rng rng);

  AgentKind kind() const { return config_.agent.kind; }
  const RunConfig& config() const { return config_; }
  // Width of z fed to the policy: skill_dim, 0 for apt, K for diayn.
  std::size_t skill_dim() const { return skill_dim_; }
  replay::BufferShape buffer_shape() const;

  Vector sample_skill(Rng& rng) const;
  Vector act(const Vector& obs, const Vector& z, Rng& rng, bool explore) const;
  // Noise-free batch policy.
  Matrix policy(const Matrix& s, const Matrix& z) const;

  // Intrinsic rewards for a batch, normalized as configured, without
  // touching any parameters or the normalizer.
  Vector peek_intrinsic(const replay::Batch& batch) const;

  UpdateMetrics update_intrinsic(const replay::Batch& batch, std::int64_t step);
  UpdateMetrics update_extrinsic(const replay::Batch& batch, std::int64_t step);

  std::int64_t updates() const { return updates_; }

  ddpg::ActorCritic& actor_critic() { return ac_; }
  const ddpg::ActorCritic& actor_critic() const { return ac_; }
  const std::optional<contrastive::CicNets>& nets() const { return nets_; }
  std::optional<contrastive::CicNets>& mutable_nets() { return nets_; }
  const std::optional<baselines::DiaynHead>& diayn() const { return diayn_; }
  const entropy::RewardNormalizer& normalizer() const { return normalizer_; }

  nn::ArrayMap export_arrays() const;
  void import_arrays(const nn::ArrayMap& arrays);

 private:
  Vector raw_intrinsic(const Matrix& s, const Matrix& s_n, const Matrix& z) const;
  double update_representation(const Matrix& tau, const Matrix& z, std::int64_t step);
  void update_policy(const replay::Batch& batch, const Vector& reward, std::int64_t step, UpdateMetrics& m);

  RunConfig config_;
  std::size_t skill_dim_ = 0;
  ddpg::ActorCritic ac_;
  std::optional<contrastive::CicNets> nets_;
  std::optional<RepresentationOptimizers> rep_opt_;
  std::optional<baselines::DiaynHead> diayn_;
  entropy::RewardNormalizer normalizer_;
  std::int64_t updates_ = 0;
};

std::size_t policy_skill_dim(const RunConfig& config);

}  // namespace cic::trainer
