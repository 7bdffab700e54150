#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "cic/envs/environment.hpp"
#include "cic/replay/replay_buffer.hpp"
#include "cic/trainer/agent.hpp"
#include "cic/trainer/run_config.hpp"

namespace cic::trainer {

// Step-indexed JSON records; steps never decrease.
class TrainLog {
 public:
  void record(nlohmann::json rec);
  const std::vector<nlohmann::json>& records() const { return records_; }
  std::string to_jsonl() const;
  std::uint64_t hash() const;

 private:
  std::vector<nlohmann::json> records_;
};

using EnvFactory = std::function<std::unique_ptr<envs::Environment>(const envs::EnvSpec&)>;

struct PretrainHooks {
  // Applied to every extrinsic reward before it reaches the buffer.
  std::function<double(double)> extrinsic_filter;
  EnvFactory make_env;
};

Agent initial_agent(const RunConfig& config);
Agent pretrain(const RunConfig& config, TrainLog* log = nullptr, const PretrainHooks& hooks = {});

std::vector<double> sweep_values(double sweep_step);

struct SweepResult {
  std::vector<double> values;
  std::vector<double> returns;
  double best_value = 0.0;
  Vector best_skill;
  std::int64_t env_steps = 0;
  std::int64_t episodes = 0;
};

// Rolls the noise-free policy for `period` steps per constant skill v*1,
// starting each candidate from a fresh reset. Transitions are pushed to
// buffer when given, with episode ids starting at first_episode.
SweepResult skill_grid_sweep(const Agent& agent, envs::Environment& env, double sweep_step, std::int64_t period,
                             Rng& env_rng, replay::ReplayBuffer* buffer = nullptr, std::int64_t first_episode = 0);

struct TrajectoryStep {
  std::int64_t episode = 0;
  std::int64_t step = 0;
  Vector obs;
  Vector action;
  double reward = 0.0;
  Vector skill;
};
using TrajectorySink = std::function<void(const TrajectoryStep&)>;

struct EvalResult {
  double mean = 0.0;
  std::vector<double> returns;
};

// Noise-free rollouts of whole episodes with a fixed skill.
EvalResult evaluate(const Agent& agent, envs::Environment& env, const Vector& skill, std::size_t episodes, Rng env_rng,
                    const TrajectorySink& sink = {});
EvalResult evaluate(const Agent& agent, const envs::EnvSpec& spec, const Vector& skill, std::size_t episodes,
                    Rng env_rng, const TrajectorySink& sink = {});

struct FinetuneHooks {
  EnvFactory make_env;
  // Sees the actor input of every phase-2 update batch.
  std::function<void(const Matrix& actor_input)> audit_actor_input;
};

struct FinetuneResult {
  Agent agent;
  SweepResult sweep;
  double zero_shot = 0.0;
  // Mean evaluation return plus envs::score_offset.
  double score = 0.0;
  std::vector<double> episode_returns;
  std::int64_t env_steps = 0;
  std::int64_t updates = 0;
};

// Sweep and random-action buffer filling inside seed_frames, then DDPG on
// the extrinsic reward with the chosen skill frozen.
FinetuneResult finetune(const Agent& pretrained, const RunConfig& config, TrainLog* log = nullptr,
                        const FinetuneHooks& hooks = {});

std::unique_ptr<envs::Environment> build_env(const envs::EnvSpec& spec, const EnvFactory& factory);

}  // namespace cic::trainer
