#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cic/baselines/diayn.hpp"
#include "cic/envs/gridworld.hpp"

namespace cic::baselines {

struct TabularDiaynConfig {
  std::size_t num_skills = 4;
  double alpha = 0.2;
  double gamma = 0.99;
  double epsilon = 0.1;
  std::size_t head_hidden = 32;
  double head_lr = 1e-3;
  std::size_t head_batch = 64;
  std::size_t update_every = 2;
  std::size_t skill_period = 50;
  std::size_t memory = 10000;
};

// Gridworld DIAYN: per-skill tabular Q-learning on one-hot cells with the
// discriminator reward log q(z | s') - log(1/K).
class TabularDiayn {
 public:
  TabularDiayn(const TabularDiaynConfig& config, const envs::GridLayout& layout, Rng& rng);

  // Runs `steps` epsilon-greedy environment steps with learning.
  void train(envs::Gridworld& env, std::int64_t steps, Rng& rng);

  envs::Move greedy(std::size_t skill, int cell) const;
  double q(std::size_t skill, int cell, envs::Move m) const;
  double reward(std::size_t skill, int cell) const;
  std::int64_t head_updates() const { return head_updates_; }
  const DiaynHead& head() const { return head_; }

 private:
  std::size_t qi(std::size_t skill, int cell, int move) const;
  void refresh_reward_table();

  TabularDiaynConfig config_;
  envs::GridLayout layout_;
  int cells_;
  std::vector<double> q_;
  DiaynHead head_;
  std::vector<double> reward_table_;
  std::vector<std::pair<int, std::size_t>> memory_;
  std::size_t memory_next_ = 0;
  std::int64_t head_updates_ = 0;
};

}  // namespace cic::baselines
