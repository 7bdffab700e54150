#include "cic/trainer/probes.hpp"

#include <cmath>

#include "cic/contrastive/skills.hpp"
#include "cic/core/errors.hpp"
#include "cic/envs/pointmass.hpp"

namespace cic::trainer {

double position_dispersion(const std::vector<std::array<double, 2>>& positions) {
  if (positions.empty()) return 0.0;
  const double n = static_cast<double>(positions.size());
  std::array<double, 2> mean{0.0, 0.0};
  for (const auto& p : positions) {
    mean[0] += p[0] / n;
    mean[1] += p[1] / n;
  }
  double var = 0.0;
  for (const auto& p : positions) {
    var += ((p[0] - mean[0]) * (p[0] - mean[0]) + (p[1] - mean[1]) * (p[1] - mean[1])) / n;
  }
  return std::sqrt(var);
}

namespace {

void require_pointmass(const envs::EnvSpec& spec, const char* what) {
  if (spec.kind != envs::EnvKind::pointmass) {
    throw ConfigError(std::string(what) + " needs [env] kind = pointmass");
  }
}

}  // namespace

DispersionProbe dispersion_probe(const Agent& agent, const envs::EnvSpec& spec, std::size_t num_skills, Rng rng) {
  require_pointmass(spec, "the dispersion probe");
  envs::EnvSpec probe = spec;
  probe.termination = envs::TerminationMode::fixed_length;
  envs::Pointmass env(probe);
  Rng skill_rng = rng.split("skills");
  Rng env_rng = rng.split("env");
  Rng unused(0);
  DispersionProbe out;
  for (std::size_t i = 0; i < num_skills; ++i) {
    const Vector z = agent.sample_skill(skill_rng);
    Vector obs = env.reset(env_rng);
    for (;;) {
      const Vector a = agent.act(obs, z, unused, false);
      const auto res = env.step({a.data(), static_cast<std::size_t>(a.size())});
      obs = res.next_obs;
      if (res.terminated) break;
    }
    out.skills.push_back(z);
    out.final_positions.push_back(env.state().position);
  }
  out.dispersion = position_dispersion(out.final_positions);
  return out;
}

std::vector<double> zero_shot_returns(const Agent& agent, const envs::EnvSpec& spec, const std::vector<Vector>& skills,
                                      std::size_t episodes, Rng env_rng) {
  std::vector<double> out;
  out.reserve(skills.size());
  for (const auto& z : skills) out.push_back(evaluate(agent, spec, z, episodes, env_rng).mean);
  return out;
}

std::vector<FlowPanel> flow_field(const Agent& agent, const envs::EnvSpec& spec, const std::vector<double>& skill_values,
                                  int grid, int horizon, const TrajectorySink& sink) {
  require_pointmass(spec, "plot-flow");
  if (grid < 1) throw ConfigError("flow grid must have at least one point per axis");
  if (horizon < 1) throw ConfigError("flow horizon must be positive");
  envs::EnvSpec fs = spec;
  fs.termination = envs::TerminationMode::fixed_length;
  fs.episode_length = std::max(fs.episode_length, horizon);
  envs::Pointmass env(fs);
  Rng unused(0);
  std::vector<FlowPanel> panels;
  std::int64_t episode = 0;
  for (double v : skill_values) {
    FlowPanel panel{v, {}};
    const Vector z = contrastive::constant_skill(v, agent.skill_dim());
    for (int iy = 0; iy < grid; ++iy) {
      for (int ix = 0; ix < grid; ++ix) {
        // Cell centres of a grid x grid partition of [-1, 1]^2.
        const double x = -1.0 + (2.0 * ix + 1.0) / grid;
        const double y = -1.0 + (2.0 * iy + 1.0) / grid;
        envs::PointmassState st;
        st.position = {x, y};
        env.set_state(st);
        Vector obs = envs::pointmass_observation(st);
        for (int t = 0; t < horizon; ++t) {
          const Vector a = agent.act(obs, z, unused, false);
          const auto res = env.step({a.data(), static_cast<std::size_t>(a.size())});
          if (sink) sink({episode, t, obs, a, res.extrinsic_reward, z});
          obs = res.next_obs;
        }
        const auto& p = env.state().position;
        panel.arrows.push_back({x, y, (p[0] - x) / horizon, (p[1] - y) / horizon});
        ++episode;
      }
    }
    panels.push_back(std::move(panel));
  }
  return panels;
}

}  // namespace cic::trainer
