#include "cic/baselines/tabular_diayn.hpp"

#include <algorithm>
#include <cmath>

#include "cic/core/errors.hpp"

namespace cic::baselines {

TabularDiayn::TabularDiayn(const TabularDiaynConfig& config, const envs::GridLayout& layout, Rng& rng)
    : config_(config), layout_(layout), cells_(layout.size * layout.size) {
  if (config_.num_skills < 2) throw ConfigError("[agent] diayn_skills must be >= 2");
  Rng q_rng = rng.split("q_init");
  q_.resize(config_.num_skills * static_cast<std::size_t>(cells_) * envs::kNumMoves);
  // Small random values make untrained greedy policies differ per skill.
  for (auto& v : q_) v = 1e-3 * q_rng.uniform();
  Rng head_rng = rng.split("head");
  head_ = DiaynHead(static_cast<std::size_t>(cells_), config_.head_hidden, config_.num_skills, config_.head_lr,
                    head_rng);
  refresh_reward_table();
}

std::size_t TabularDiayn::qi(std::size_t skill, int cell, int move) const {
  return (skill * static_cast<std::size_t>(cells_) + static_cast<std::size_t>(cell)) * envs::kNumMoves +
         static_cast<std::size_t>(move);
}

double TabularDiayn::q(std::size_t skill, int cell, envs::Move m) const {
  return q_[qi(skill, cell, static_cast<int>(m))];
}

double TabularDiayn::reward(std::size_t skill, int cell) const {
  return reward_table_[skill * static_cast<std::size_t>(cells_) + static_cast<std::size_t>(cell)];
}

envs::Move TabularDiayn::greedy(std::size_t skill, int cell) const {
  int best = 0;
  for (int m = 1; m < envs::kNumMoves; ++m) {
    if (q_[qi(skill, cell, m)] > q_[qi(skill, cell, best)]) best = m;
  }
  return static_cast<envs::Move>(best);
}

void TabularDiayn::refresh_reward_table() {
  const Matrix all = Matrix::Identity(cells_, cells_);
  const Matrix logp = log_softmax_rows(head_.net.forward(all));
  const double log_k = std::log(static_cast<double>(config_.num_skills));
  reward_table_.resize(config_.num_skills * static_cast<std::size_t>(cells_));
  for (int c = 0; c < cells_; ++c) {
    for (std::size_t z = 0; z < config_.num_skills; ++z) {
      reward_table_[z * static_cast<std::size_t>(cells_) + static_cast<std::size_t>(c)] =
          logp(c, static_cast<Eigen::Index>(z)) + log_k;
    }
  }
}

void TabularDiayn::train(envs::Gridworld& env, std::int64_t steps, Rng& rng) {
  Rng reset_rng = rng.split("reset");
  env.reset(reset_rng);
  std::size_t skill = rng.index(config_.num_skills);
  for (std::int64_t t = 0; t < steps; ++t) {
    if (env.state().step % static_cast<int>(config_.skill_period) == 0) skill = rng.index(config_.num_skills);
    const int cell = env.cell();
    const envs::Move move =
        rng.uniform() < config_.epsilon ? static_cast<envs::Move>(rng.index(envs::kNumMoves)) : greedy(skill, cell);
    const auto res = env.step_discrete(move);
    const int next = env.cell();

    if (memory_.size() < config_.memory) {
      memory_.emplace_back(next, skill);
    } else {
      memory_[memory_next_] = {next, skill};
      memory_next_ = (memory_next_ + 1) % config_.memory;
    }

    const double r = reward(skill, next);
    double best_next = q_[qi(skill, next, 0)];
    for (int m = 1; m < envs::kNumMoves; ++m) best_next = std::max(best_next, q_[qi(skill, next, m)]);
    // Time-limit ends are not terminal states, so the bootstrap stays on.
    double& qsa = q_[qi(skill, cell, static_cast<int>(move))];
    qsa += config_.alpha * (r + config_.gamma * best_next - qsa);

    if (res.terminated) env.reset(reset_rng);

    if ((t + 1) % static_cast<std::int64_t>(config_.update_every) == 0 && !memory_.empty()) {
      Matrix s = Matrix::Zero(static_cast<Eigen::Index>(config_.head_batch), cells_);
      std::vector<std::size_t> labels(config_.head_batch);
      for (std::size_t b = 0; b < config_.head_batch; ++b) {
        const auto& [c, z] = memory_[rng.index(memory_.size())];
        s(static_cast<Eigen::Index>(b), c) = 1.0;
        labels[b] = z;
      }
      diayn_update(head_, s, labels);
      ++head_updates_;
      refresh_reward_table();
    }
  }
}

}  // namespace cic::baselines
