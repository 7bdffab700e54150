#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cic/core/rng.hpp"

namespace cic::envs {

using Vector = Eigen::VectorXd;

enum class EnvKind { pointmass, gridworld };
enum class TerminationMode { fixed_length, early_termination };
enum class GridEncoding { coords, onehot };

std::string to_string(EnvKind k);
std::string to_string(TerminationMode m);
std::string to_string(GridEncoding e);
EnvKind parse_env_kind(const std::string& s);
TerminationMode parse_termination(const std::string& s);
GridEncoding parse_grid_encoding(const std::string& s);

struct PointmassPhysics {
  double dt = 0.05;
  double damping = 0.05;
  double force_scale = 1.0;
  // Reset positions are uniform in [-start_spread, start_spread]^2.
  double start_spread = 0.1;
  // Early-termination mode ends the episode inside this band along the walls.
  double cliff_width = 0.1;
};

struct GridLayout {
  int size = 10;
  int start_x = 4;
  int start_y = 4;
  GridEncoding encoding = GridEncoding::coords;
};

struct EnvSpec {
  EnvKind kind = EnvKind::pointmass;
  int episode_length = 200;
  TerminationMode termination = TerminationMode::fixed_length;
  std::string task = "reach_ne";
  PointmassPhysics physics;
  GridLayout grid;

  std::size_t obs_dim() const;
  std::size_t action_dim() const;
  void validate() const;
};

std::vector<std::string> tasks_for(EnvKind kind);

// Added to episode returns when reporting scores so that every task has a
// non-negative floor: reach tasks pay -distance per step, bounded by the
// arena diagonal.
double score_offset(const EnvSpec& spec);

struct StepResult {
  Vector next_obs;
  double extrinsic_reward = 0.0;
  // Episode is over (time limit or failure).
  bool terminated = false;
  // Ended by failure rather than the time limit: the bootstrap value is zero.
  bool failure = false;
  int step_index = 0;
};

// Continuous-action interface used by every agent. Actions are read in
// [-1, 1]^action_dim; values outside are clamped.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual Vector reset(Rng& rng) = 0;
  virtual StepResult step(std::span<const double> action) = 0;
  // Notified whenever the acting skill changes. Used by probe tasks.
  virtual void observe_skill(std::span<const double> /*skill*/) {}

  std::size_t obs_dim() const { return spec().obs_dim(); }
  std::size_t action_dim() const { return spec().action_dim(); }
};

std::unique_ptr<Environment> make_environment(const EnvSpec& spec);

}  // namespace cic::envs
