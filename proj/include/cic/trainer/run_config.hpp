#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cic/contrastive/intrinsic_reward.hpp"
#include "cic/entropy/particle_entropy.hpp"
#include "cic/envs/environment.hpp"
#include "cic/io/config_file.hpp"

namespace cic::trainer {

enum class AgentKind { cic, apt, diayn };

std::string to_string(AgentKind k);
AgentKind parse_agent_kind(const std::string& s);

struct AgentConfig {
  AgentKind kind = AgentKind::cic;
  std::size_t hidden_dim = 128;
  std::size_t depth = 2;
  std::size_t skill_dim = 16;
  double temperature = 0.5;
  contrastive::RewardVariant variant = contrastive::RewardVariant::entropy;
  std::size_t ensemble_size = 2;
  bool prediction_head = true;
  // Train key/skill encoders with the contrastive loss.
  bool representation_learning = true;
  std::size_t skill_period = 50;
  std::size_t knn_k = 12;
  entropy::EntropyForm entropy_form = entropy::EntropyForm::log1p_mean;
  bool reward_norm = true;
  double lr = 1e-4;
  std::size_t batch_size = 256;
  std::size_t nstep = 3;
  double gamma = 0.99;
  double critic_tau = 0.01;
  double stddev = 0.2;
  double stddev_clip = 0.3;
  std::size_t update_every = 2;
  std::size_t buffer_capacity = 100000;
  std::size_t diayn_skills = 4;
  std::size_t diayn_hidden = 32;
  double diayn_lr = 1e-3;
  double tabular_alpha = 0.2;
  double tabular_epsilon = 0.1;
};

struct TrainConfig {
  std::uint64_t seed = 1;
  std::int64_t num_pretrain_steps = 50000;
  std::int64_t num_finetune_steps = 10000;
  std::int64_t seed_frames = 2000;
  double sweep_step = 0.1;
  std::int64_t sweep_period = 100;
  std::size_t eval_episodes = 5;
  std::int64_t log_every = 1000;
  std::size_t probe_skills = 16;
  std::size_t coverage_skills = 100;
};

struct StatsConfig {
  std::size_t resamples = 2000;
  double level = 0.95;
  std::uint64_t seed = 7;
};

struct RunConfig {
  envs::EnvSpec env;
  AgentConfig agent;
  TrainConfig train;
  StatsConfig stats;

  void validate() const;
  std::size_t sweep_candidates() const;
};

// Every key must be known; [env] kind is required.
RunConfig resolve_config(const io::ConfigFile& file);
// Canonical, fully-resolved text; resolve_config(parse(render)) round-trips.
std::string render_config(const RunConfig& config);
std::vector<std::string> known_keys();

}  // namespace cic::trainer
