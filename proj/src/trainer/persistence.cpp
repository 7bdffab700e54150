#include "cic/trainer/persistence.hpp"

#include "cic/core/errors.hpp"
#include "cic/nn/mlp.hpp"

namespace cic::trainer {

std::string config_echo(const RunConfig& config) {
  return "# init_scheme = " + std::string(nn::Mlp::kInitScheme) + "\n" + render_config(config);
}

io::Checkpoint make_checkpoint(const Agent& agent, const std::optional<Vector>& selected_skill) {
  io::Checkpoint out;
  out.config_echo = config_echo(agent.config());
  out.arrays = agent.export_arrays();
  if (selected_skill) out.arrays["finetune/skill"] = nn::to_tensor(*selected_skill);
  return out;
}

LoadedAgent load_agent(const io::Checkpoint& ckpt, const io::ConfigFile& overrides) {
  io::ConfigFile file;
  try {
    file = io::ConfigFile::parse(ckpt.config_echo);
  } catch (const ConfigError& e) {
    throw CorruptionError(std::string("checkpoint config echo is unreadable: ") + e.what());
  }
  RunConfig stored;
  try {
    stored = resolve_config(file);
  } catch (const ConfigError& e) {
    throw CorruptionError(std::string("checkpoint config echo is invalid: ") + e.what());
  }
  for (const auto& [name, value] : overrides.values()) {
    const auto dot = name.find('.');
    file.set(name.substr(0, dot), name.substr(dot + 1), value);
  }
  RunConfig cfg = resolve_config(file);
  // Network shapes come from the checkpoint; everything that builds them
  // must stay as stored.
  const auto& a = stored.agent;
  const auto& b = cfg.agent;
  if (a.kind != b.kind || a.hidden_dim != b.hidden_dim || a.depth != b.depth || a.skill_dim != b.skill_dim ||
      a.prediction_head != b.prediction_head || a.variant != b.variant || a.ensemble_size != b.ensemble_size ||
      a.diayn_skills != b.diayn_skills || a.diayn_hidden != b.diayn_hidden ||
      a.representation_learning != b.representation_learning || stored.env.kind != cfg.env.kind ||
      stored.env.obs_dim() != cfg.env.obs_dim()) {
    throw ConfigError("overrides may not change the agent architecture stored in the checkpoint");
  }
  // Built from the merged config so run-time settings (lr, noise, ...)
  // take effect; every parameter is then restored from the arrays.
  Agent merged(cfg, Rng(0));
  merged.import_arrays(ckpt.arrays);
  std::optional<Vector> skill;
  const auto it = ckpt.arrays.find("finetune/skill");
  if (it != ckpt.arrays.end()) {
    skill = nn::vector_from(it->second, static_cast<Eigen::Index>(merged.skill_dim()), "finetune/skill");
  }
  return {cfg, std::move(merged), skill};
}

}  // namespace cic::trainer
