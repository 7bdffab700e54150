#include "cic/envs/environment.hpp"

#include <algorithm>
#include <cmath>

#include "cic/core/errors.hpp"
#include "cic/envs/gridworld.hpp"
#include "cic/envs/pointmass.hpp"

namespace cic::envs {

std::string to_string(EnvKind k) { return k == EnvKind::pointmass ? "pointmass" : "gridworld"; }

std::string to_string(TerminationMode m) {
  return m == TerminationMode::fixed_length ? "fixed_length" : "early_termination";
}

std::string to_string(GridEncoding e) { return e == GridEncoding::coords ? "coords" : "onehot"; }

EnvKind parse_env_kind(const std::string& s) {
  if (s == "pointmass") return EnvKind::pointmass;
  if (s == "gridworld") return EnvKind::gridworld;
  throw ConfigError("[env] kind: unknown environment '" + s + "' (expected pointmass | gridworld)");
}

TerminationMode parse_termination(const std::string& s) {
  if (s == "fixed_length" || s == "fixed") return TerminationMode::fixed_length;
  if (s == "early_termination" || s == "early") return TerminationMode::early_termination;
  throw ConfigError("[env] termination: unknown mode '" + s + "' (expected fixed_length | early_termination)");
}

GridEncoding parse_grid_encoding(const std::string& s) {
  if (s == "coords") return GridEncoding::coords;
  if (s == "onehot") return GridEncoding::onehot;
  throw ConfigError("[env] grid_encoding: unknown encoding '" + s + "' (expected coords | onehot)");
}

std::size_t EnvSpec::obs_dim() const {
  if (kind == EnvKind::pointmass) return 4;
  return grid.encoding == GridEncoding::onehot ? static_cast<std::size_t>(grid.size * grid.size) : 2;
}

std::size_t EnvSpec::action_dim() const { return 2; }

std::vector<std::string> tasks_for(EnvKind kind) {
  if (kind == EnvKind::pointmass) return {"reach_nw", "reach_ne", "reach_sw", "reach_se", "run_x"};
  return {"reach_corner"};
}

double score_offset(const EnvSpec& spec) {
  if (spec.kind == EnvKind::pointmass && spec.task.rfind("reach_", 0) == 0) {
    return spec.episode_length * 2.0 * std::sqrt(2.0);
  }
  return 0.0;
}

void EnvSpec::validate() const {
  if (episode_length < 1) throw ConfigError("[env] episode_length must be >= 1");
  const auto valid = tasks_for(kind);
  if (std::find(valid.begin(), valid.end(), task) == valid.end()) {
    std::string list;
    for (const auto& t : valid) list += (list.empty() ? "" : ", ") + t;
    throw ConfigError("unknown task '" + task + "' for " + to_string(kind) + " (valid: " + list + ")");
  }
  if (kind == EnvKind::pointmass) {
    if (!(physics.dt > 0.0)) throw ConfigError("[env] dt must be > 0");
    if (physics.damping < 0.0 || physics.damping > 1.0) throw ConfigError("[env] damping must lie in [0, 1]");
    if (physics.start_spread < 0.0 || physics.start_spread > 1.0) {
      throw ConfigError("[env] start_spread must lie in [0, 1]");
    }
  } else {
    if (grid.size < 2) throw ConfigError("[env] grid_size must be >= 2");
    if (grid.start_x < 0 || grid.start_x >= grid.size || grid.start_y < 0 || grid.start_y >= grid.size) {
      throw ConfigError("[env] grid start cell lies outside the grid");
    }
    if (termination != TerminationMode::fixed_length) {
      throw ConfigError("[env] termination: gridworld supports fixed_length only");
    }
  }
}

std::unique_ptr<Environment> make_environment(const EnvSpec& spec) {
  spec.validate();
  if (spec.kind == EnvKind::pointmass) return std::make_unique<Pointmass>(spec);
  return std::make_unique<Gridworld>(spec);
}

}  // namespace cic::envs
