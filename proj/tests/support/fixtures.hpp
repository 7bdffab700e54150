#pragma once

#include <memory>

#include "cic/envs/pointmass.hpp"
#include "cic/trainer/run_config.hpp"
#include "cic/trainer/trainer.hpp"

namespace cic::fixtures {

// Pointmass dynamics with the reward replaced by -|mean(z) - optimum| for
// the skill most recently announced through observe_skill.
class PlantedSkillEnv final : public envs::Environment {
 public:
  PlantedSkillEnv(envs::EnvSpec spec, double optimum) : inner_(std::move(spec)), optimum_(optimum) {}
  const envs::EnvSpec& spec() const override { return inner_.spec(); }
  envs::Vector reset(Rng& rng) override { return inner_.reset(rng); }
  envs::StepResult step(std::span<const double> action) override {
    auto r = inner_.step(action);
    r.extrinsic_reward = -std::abs(mean_ - optimum_);
    return r;
  }
  void observe_skill(std::span<const double> z) override {
    double s = 0.0;
    for (double v : z) s += v;
    mean_ = z.empty() ? 0.0 : s / static_cast<double>(z.size());
  }

 private:
  envs::Pointmass inner_;
  double optimum_;
  double mean_ = 0.0;
};

inline trainer::EnvFactory planted_factory(double optimum) {
  return [optimum](const envs::EnvSpec& spec) { return std::make_unique<PlantedSkillEnv>(spec, optimum); };
}

// Small nets and budgets for fast pipeline tests.
inline trainer::RunConfig tiny_config(trainer::AgentKind kind = trainer::AgentKind::cic) {
  trainer::RunConfig c;
  c.agent.kind = kind;
  c.agent.hidden_dim = 16;
  c.agent.batch_size = 32;
  c.agent.skill_dim = kind == trainer::AgentKind::apt ? 0 : 4;
  c.agent.buffer_capacity = 5000;
  c.train.num_pretrain_steps = 1400;
  c.train.seed_frames = 1200;
  c.train.num_finetune_steps = 1500;
  c.train.eval_episodes = 2;
  c.train.log_every = 100;
  return c;
}

}  // namespace cic::fixtures
