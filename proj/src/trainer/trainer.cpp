#include "cic/trainer/trainer.hpp"

#include <cmath>

#include "cic/contrastive/skills.hpp"
#include "cic/core/errors.hpp"

namespace cic::trainer {

void TrainLog::record(nlohmann::json rec) {
  const std::int64_t step = rec.at("step").get<std::int64_t>();
  if (!records_.empty() && step < records_.back().at("step").get<std::int64_t>()) {
    throw InternalError("train log steps must not decrease");
  }
  records_.push_back(std::move(rec));
}

std::string TrainLog::to_jsonl() const {
  std::string out;
  for (const auto& r : records_) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

std::uint64_t TrainLog::hash() const { return fnv1a64(to_jsonl()); }

namespace {

std::vector<double> to_std(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json metrics_json(std::int64_t step, const std::string& phase, const UpdateMetrics& m, const Vector& skill) {
  return {{"step", step},
          {"phase", phase},
          {"event", "update"},
          {"intrinsic_reward_mean", m.intrinsic_mean},
          {"cic_loss", m.cic_loss},
          {"critic_loss", m.critic_loss},
          {"actor_loss", m.actor_loss},
          {"skill", to_std(skill)}};
}

Rng stream(const RunConfig& c, std::string_view phase, std::string_view part) {
  return Rng(c.train.seed).split(phase).split(part);
}

void check_obs(const Vector& obs, std::int64_t step) {
  if (!obs.allFinite()) throw TrainingError("non-finite observation", step);
}

}  // namespace

std::unique_ptr<envs::Environment> build_env(const envs::EnvSpec& spec, const EnvFactory& factory) {
  return factory ? factory(spec) : envs::make_environment(spec);
}

Agent initial_agent(const RunConfig& config) { return Agent(config, Rng(config.train.seed).split("agent")); }

Agent pretrain(const RunConfig& config, TrainLog* log, const PretrainHooks& hooks) {
  config.validate();
  Agent agent = initial_agent(config);
  auto env = build_env(config.env, hooks.make_env);
  Rng env_rng = stream(config, "pretrain", "env");
  Rng act_rng = stream(config, "pretrain", "act");
  Rng skill_rng = stream(config, "pretrain", "skill");
  Rng replay_rng = stream(config, "pretrain", "replay");
  const auto& a = config.agent;
  replay::ReplayBuffer buffer(agent.buffer_shape(), a.buffer_capacity, a.nstep, a.gamma);

  Vector obs = env->reset(env_rng);
  std::int64_t episode = 0;
  std::int64_t ep_step = 0;
  double ep_return = 0.0;
  Vector z = agent.sample_skill(skill_rng);
  env->observe_skill({z.data(), static_cast<std::size_t>(z.size())});
  UpdateMetrics last;
  bool have_metrics = false;

  const std::int64_t total = config.train.num_pretrain_steps;
  for (std::int64_t t = 0; t < total; ++t) {
    if (ep_step > 0 && ep_step % static_cast<std::int64_t>(a.skill_period) == 0) {
      z = agent.sample_skill(skill_rng);
      env->observe_skill({z.data(), static_cast<std::size_t>(z.size())});
    }
    const Vector action = agent.act(obs, z, act_rng, true);
    const auto res = env->step({action.data(), static_cast<std::size_t>(action.size())});
    check_obs(res.next_obs, t);
    const double r_ext = hooks.extrinsic_filter ? hooks.extrinsic_filter(res.extrinsic_reward) : res.extrinsic_reward;
    ep_return += res.extrinsic_reward;
    buffer.push({obs, action, r_ext, res.next_obs, z, episode, ep_step, res.failure});
    obs = res.next_obs;
    ++ep_step;
    if (res.terminated) {
      if (log) {
        log->record({{"step", t + 1}, {"phase", "pretrain"}, {"event", "episode_end"}, {"episode", episode},
                     {"episode_length", ep_step}});
      }
      ++episode;
      ep_step = 0;
      ep_return = 0.0;
      obs = env->reset(env_rng);
      z = agent.sample_skill(skill_rng);
      env->observe_skill({z.data(), static_cast<std::size_t>(z.size())});
    }
    const std::int64_t past_seed = t + 1 - config.train.seed_frames;
    if (past_seed > 0 && past_seed % static_cast<std::int64_t>(a.update_every) == 0) {
      auto batch = buffer.sample_batch(replay_rng, a.batch_size);
      if (batch) {
        last = agent.update_intrinsic(*batch, t + 1);
        have_metrics = true;
      }
    }
    if (log && have_metrics && (t + 1) % config.train.log_every == 0) {
      log->record(metrics_json(t + 1, "pretrain", last, z));
    }
  }
  (void)ep_return;
  return agent;
}

std::vector<double> sweep_values(double sweep_step) {
  if (!(sweep_step > 0.0 && sweep_step <= 1.0)) throw ConfigError("[train] sweep_step must lie in (0, 1]");
  const auto n = static_cast<std::int64_t>(std::llround(1.0 / sweep_step));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n + 1));
  for (std::int64_t i = 0; i <= n; ++i) out.push_back(static_cast<double>(i) / static_cast<double>(n));
  return out;
}

SweepResult skill_grid_sweep(const Agent& agent, envs::Environment& env, double sweep_step, std::int64_t period,
                             Rng& env_rng, replay::ReplayBuffer* buffer, std::int64_t first_episode) {
  SweepResult out;
  out.values = sweep_values(sweep_step);
  Rng unused(0);
  std::int64_t episode = first_episode;
  for (double v : out.values) {
    const Vector z = contrastive::constant_skill(v, agent.skill_dim());
    Vector obs = env.reset(env_rng);
    env.observe_skill({z.data(), static_cast<std::size_t>(z.size())});
    std::int64_t ep_step = 0;
    double total = 0.0;
    for (std::int64_t t = 0; t < period; ++t) {
      const Vector action = agent.act(obs, z, unused, false);
      const auto res = env.step({action.data(), static_cast<std::size_t>(action.size())});
      total += res.extrinsic_reward;
      if (buffer) buffer->push({obs, action, res.extrinsic_reward, res.next_obs, z, episode, ep_step, res.failure});
      obs = res.next_obs;
      ++ep_step;
      ++out.env_steps;
      if (res.terminated && t + 1 < period) {
        ++episode;
        ep_step = 0;
        obs = env.reset(env_rng);
        env.observe_skill({z.data(), static_cast<std::size_t>(z.size())});
      }
    }
    ++episode;
    out.returns.push_back(total);
  }
  out.episodes = episode - first_episode;
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.returns.size(); ++i) {
    if (out.returns[i] > out.returns[best]) best = i;
  }
  out.best_value = out.values[best];
  out.best_skill = contrastive::constant_skill(out.best_value, agent.skill_dim());
  return out;
}

EvalResult evaluate(const Agent& agent, envs::Environment& env, const Vector& skill, std::size_t episodes, Rng env_rng,
                    const TrajectorySink& sink) {
  if (episodes == 0) throw ConfigError("[train] eval_episodes must be positive");
  EvalResult out;
  Rng unused(0);
  for (std::size_t e = 0; e < episodes; ++e) {
    Vector obs = env.reset(env_rng);
    env.observe_skill({skill.data(), static_cast<std::size_t>(skill.size())});
    double ret = 0.0;
    for (std::int64_t t = 0;; ++t) {
      const Vector action = agent.act(obs, skill, unused, false);
      const auto res = env.step({action.data(), static_cast<std::size_t>(action.size())});
      if (sink) sink({static_cast<std::int64_t>(e), t, obs, action, res.extrinsic_reward, skill});
      ret += res.extrinsic_reward;
      obs = res.next_obs;
      if (res.terminated) break;
    }
    out.returns.push_back(ret);
  }
  double sum = 0.0;
  for (double r : out.returns) sum += r;
  out.mean = sum / static_cast<double>(out.returns.size());
  return out;
}

EvalResult evaluate(const Agent& agent, const envs::EnvSpec& spec, const Vector& skill, std::size_t episodes,
                    Rng env_rng, const TrajectorySink& sink) {
  auto env = envs::make_environment(spec);
  return evaluate(agent, *env, skill, episodes, env_rng, sink);
}

FinetuneResult finetune(const Agent& pretrained, const RunConfig& config, TrainLog* log, const FinetuneHooks& hooks) {
  config.validate();
  FinetuneResult out{pretrained, {}, 0.0, 0.0, {}, 0, 0};
  Agent& agent = out.agent;
  auto env = build_env(config.env, hooks.make_env);
  Rng env_rng = stream(config, "finetune", "env");
  Rng act_rng = stream(config, "finetune", "act");
  Rng replay_rng = stream(config, "finetune", "replay");
  const auto& a = config.agent;
  replay::ReplayBuffer buffer(agent.buffer_shape(), a.buffer_capacity, a.nstep, a.gamma);

  // Phase 1a: score every candidate skill with the noise-free policy.
  out.sweep = skill_grid_sweep(agent, *env, config.train.sweep_step, config.train.sweep_period, env_rng, &buffer, 0);
  const Vector z = out.sweep.best_skill;
  std::int64_t episode = out.sweep.episodes;
  std::int64_t t = out.sweep.env_steps;
  if (log) {
    log->record({{"step", t}, {"phase", "sweep"}, {"event", "skill_selected"}, {"value", out.sweep.best_value},
                 {"candidates", out.sweep.values}, {"returns", out.sweep.returns}});
  }
  {
    auto eval_env = build_env(config.env, hooks.make_env);
    out.zero_shot = evaluate(agent, *eval_env, z, config.train.eval_episodes, stream(config, "eval", "env")).mean +
                     envs::score_offset(config.env);
  }

  Vector obs = env->reset(env_rng);
  env->observe_skill({z.data(), static_cast<std::size_t>(z.size())});
  std::int64_t ep_step = 0;
  double ep_return = 0.0;
  const auto end_episode = [&](std::int64_t step) {
    if (log) {
      log->record({{"step", step}, {"phase", "finetune"}, {"event", "episode_end"}, {"episode", episode},
                   {"episode_return", ep_return}});
    }
    ++episode;
    ep_step = 0;
    ep_return = 0.0;
    obs = env->reset(env_rng);
    env->observe_skill({z.data(), static_cast<std::size_t>(z.size())});
  };

  // Phase 1b: uniform random actions fill the rest of the seed frames.
  const std::size_t adim = env->action_dim();
  for (; t < config.train.seed_frames; ++t) {
    Vector action(static_cast<Eigen::Index>(adim));
    for (std::size_t i = 0; i < adim; ++i) action[static_cast<Eigen::Index>(i)] = act_rng.uniform(-1.0, 1.0);
    const auto res = env->step({action.data(), adim});
    check_obs(res.next_obs, t);
    buffer.push({obs, action, res.extrinsic_reward, res.next_obs, z, episode, ep_step, res.failure});
    ep_return += res.extrinsic_reward;
    obs = res.next_obs;
    ++ep_step;
    if (res.terminated) end_episode(t + 1);
  }

  // Phase 2: extrinsic DDPG with z frozen.
  UpdateMetrics last;
  bool have_metrics = false;
  for (; t < config.train.num_finetune_steps; ++t) {
    const Vector action = agent.act(obs, z, act_rng, true);
    const auto res = env->step({action.data(), adim});
    check_obs(res.next_obs, t);
    buffer.push({obs, action, res.extrinsic_reward, res.next_obs, z, episode, ep_step, res.failure});
    ep_return += res.extrinsic_reward;
    obs = res.next_obs;
    ++ep_step;
    if (res.terminated) end_episode(t + 1);
    const std::int64_t past_seed = t + 1 - config.train.seed_frames;
    if (past_seed % static_cast<std::int64_t>(a.update_every) == 0) {
      auto batch = buffer.sample_batch(replay_rng, a.batch_size);
      if (batch) {
        // Every update sees the frozen skill, not the sweep candidates.
        batch->z.rowwise() = z.transpose();
        if (hooks.audit_actor_input) hooks.audit_actor_input(ddpg::actor_input(batch->s, batch->z));
        last = agent.update_extrinsic(*batch, t + 1);
        have_metrics = true;
        ++out.updates;
      }
    }
    if (log && have_metrics && (t + 1) % config.train.log_every == 0) {
      log->record(metrics_json(t + 1, "finetune", last, z));
    }
  }
  out.env_steps = t;

  auto eval_env = build_env(config.env, hooks.make_env);
  const EvalResult ev = evaluate(agent, *eval_env, z, config.train.eval_episodes, stream(config, "eval", "env"));
  out.score = ev.mean + envs::score_offset(config.env);
  out.episode_returns = ev.returns;
  if (log) {
    log->record({{"step", t}, {"phase", "eval"}, {"event", "score"}, {"score", out.score},
                 {"zero_shot", out.zero_shot}, {"returns", out.episode_returns}});
  }
  return out;
}

}  // namespace cic::trainer
