#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "cic/trainer/agent.hpp"
#include "cic/trainer/trainer.hpp"

namespace cic::trainer {

struct DispersionProbe {
  std::vector<Vector> skills;
  std::vector<std::array<double, 2>> final_positions;
  // sqrt of the summed per-axis population variance of final positions.
  double dispersion = 0.0;
};

double position_dispersion(const std::vector<std::array<double, 2>>& positions);

// One fixed-length, noise-free pointmass episode per random skill.
DispersionProbe dispersion_probe(const Agent& agent, const envs::EnvSpec& spec, std::size_t num_skills, Rng rng);

// Zero-shot return of each skill (mean over `episodes` noise-free episodes).
std::vector<double> zero_shot_returns(const Agent& agent, const envs::EnvSpec& spec, const std::vector<Vector>& skills,
                                      std::size_t episodes, Rng env_rng);

struct FlowArrow {
  double x = 0.0;
  double y = 0.0;
  // Mean displacement per step over the horizon.
  double dx = 0.0;
  double dy = 0.0;
};

struct FlowPanel {
  double skill_value = 0.0;
  std::vector<FlowArrow> arrows;
};

// For each constant skill v*1 and each grid point of the arena, roll the
// noise-free policy from rest for `horizon` steps.
std::vector<FlowPanel> flow_field(const Agent& agent, const envs::EnvSpec& spec, const std::vector<double>& skill_values,
                                  int grid, int horizon, const TrajectorySink& sink = {});

}  // namespace cic::trainer
