#pragma once

#include <array>
#include <cstdint>

#include "cic/envs/environment.hpp"

namespace cic::envs {

struct PointmassState {
  std::array<double, 2> position{0.0, 0.0};
  std::array<double, 2> velocity{0.0, 0.0};
  int step = 0;
};

PointmassState pointmass_reset(const PointmassPhysics& physics, Rng& rng);
PointmassState pointmass_reset(const PointmassPhysics& physics, std::uint64_t seed);
Vector pointmass_observation(const PointmassState& state);

// Semi-implicit Euler inside the [-1, 1]^2 arena; velocity along an axis
// is zeroed on wall contact. Reward is evaluated on the new state.
StepResult pointmass_step(const EnvSpec& spec, PointmassState& state, std::span<const double> action);

double pointmass_task_reward(const std::string& task, const PointmassState& state);

class Pointmass final : public Environment {
 public:
  explicit Pointmass(EnvSpec spec);

  const EnvSpec& spec() const override { return spec_; }
  Vector reset(Rng& rng) override;
  StepResult step(std::span<const double> action) override;

  const PointmassState& state() const { return state_; }
  void set_state(const PointmassState& s) { state_ = s; }

 private:
  EnvSpec spec_;
  PointmassState state_;
};

}  // namespace cic::envs
