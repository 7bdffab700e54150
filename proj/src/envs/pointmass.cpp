#include "cic/envs/pointmass.hpp"

#include <algorithm>
#include <cmath>

#include "cic/core/errors.hpp"

namespace cic::envs {

PointmassState pointmass_reset(const PointmassPhysics& physics, Rng& rng) {
  PointmassState s;
  s.position[0] = rng.uniform(-physics.start_spread, physics.start_spread);
  s.position[1] = rng.uniform(-physics.start_spread, physics.start_spread);
  return s;
}

PointmassState pointmass_reset(const PointmassPhysics& physics, std::uint64_t seed) {
  Rng rng(seed);
  return pointmass_reset(physics, rng);
}

Vector pointmass_observation(const PointmassState& s) {
  Vector o(4);
  o << s.position[0], s.position[1], s.velocity[0], s.velocity[1];
  return o;
}

double pointmass_task_reward(const std::string& task, const PointmassState& s) {
  const auto dist_to = [&](double cx, double cy) {
    return -std::hypot(s.position[0] - cx, s.position[1] - cy);
  };
  if (task == "reach_nw") return dist_to(-1.0, 1.0);
  if (task == "reach_ne") return dist_to(1.0, 1.0);
  if (task == "reach_sw") return dist_to(-1.0, -1.0);
  if (task == "reach_se") return dist_to(1.0, -1.0);
  if (task == "run_x") return s.velocity[0];
  throw ConfigError("unknown pointmass task '" + task + "'");
}

StepResult pointmass_step(const EnvSpec& spec, PointmassState& s, std::span<const double> action) {
  const auto& ph = spec.physics;
  for (int i = 0; i < 2; ++i) {
    double a = i < static_cast<int>(action.size()) ? action[i] : 0.0;
    if (!std::isfinite(a)) a = 0.0;
    a = std::clamp(a, -1.0, 1.0);
    s.velocity[i] = (1.0 - ph.damping) * s.velocity[i] + ph.force_scale * a * ph.dt;
    const double p = s.position[i] + s.velocity[i] * ph.dt;
    if (p > 1.0 || p < -1.0) {
      s.position[i] = std::clamp(p, -1.0, 1.0);
      s.velocity[i] = 0.0;
    } else {
      s.position[i] = p;
    }
  }
  s.step += 1;

  StepResult r;
  r.next_obs = pointmass_observation(s);
  r.extrinsic_reward = pointmass_task_reward(spec.task, s);
  r.step_index = s.step;
  if (spec.termination == TerminationMode::early_termination) {
    const double edge = 1.0 - ph.cliff_width;
    if (std::abs(s.position[0]) > edge || std::abs(s.position[1]) > edge) {
      r.terminated = true;
      r.failure = true;
    }
  }
  if (s.step >= spec.episode_length) r.terminated = true;
  return r;
}

Pointmass::Pointmass(EnvSpec spec) : spec_(std::move(spec)) {}

Vector Pointmass::reset(Rng& rng) {
  state_ = pointmass_reset(spec_.physics, rng);
  return pointmass_observation(state_);
}

StepResult Pointmass::step(std::span<const double> action) { return pointmass_step(spec_, state_, action); }

}  // namespace cic::envs
