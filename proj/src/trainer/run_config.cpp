#include "cic/trainer/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "cic/core/errors.hpp"

namespace cic::trainer {

std::string to_string(AgentKind k) {
  switch (k) {
    case AgentKind::cic:
      return "cic";
    case AgentKind::apt:
      return "apt";
    case AgentKind::diayn:
      return "diayn";
  }
  return "cic";
}

AgentKind parse_agent_kind(const std::string& s) {
  if (s == "cic") return AgentKind::cic;
  if (s == "apt") return AgentKind::apt;
  if (s == "diayn") return AgentKind::diayn;
  throw ConfigError("[agent] kind: unknown agent '" + s + "' (expected cic | apt | diayn)");
}

namespace {

struct Key {
  std::string section;
  std::string name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

double parse_double(const std::string& v, const std::string& at) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(at + ": expected a number, got '" + v + "'");
  }
  return out;
}

template <typename Int>
Int parse_int(const std::string& v, const std::string& at) {
  Int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(at + ": expected an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& v, const std::string& at) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError(at + ": expected true | false, got '" + v + "'");
}

template <typename T, typename Field>
Key num_key(const std::string& section, const std::string& name, Field field) {
  Key k{section, name, {}, {}};
  k.get = [field](const RunConfig& c) {
    if constexpr (std::is_floating_point_v<T>) {
      return fmt_double(field(const_cast<RunConfig&>(c)));
    } else {
      return std::to_string(field(const_cast<RunConfig&>(c)));
    }
  };
  k.set = [field, section, name](RunConfig& c, const std::string& v) {
    if constexpr (std::is_floating_point_v<T>) {
      field(c) = parse_double(v, where(section, name));
    } else {
      field(c) = parse_int<T>(v, where(section, name));
    }
  };
  return k;
}

template <typename Field>
Key bool_key(const std::string& section, const std::string& name, Field field) {
  Key k{section, name, {}, {}};
  k.get = [field](const RunConfig& c) { return std::string(field(const_cast<RunConfig&>(c)) ? "true" : "false"); };
  k.set = [field, section, name](RunConfig& c, const std::string& v) { field(c) = parse_bool(v, where(section, name)); };
  return k;
}

#define CIC_NUM(T, sec, name, expr) num_key<T>(sec, name, [](RunConfig& c) -> T& { return expr; })
#define CIC_BOOL(sec, name, expr) bool_key(sec, name, [](RunConfig& c) -> bool& { return expr; })

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    k.push_back({"env", "kind", [](const RunConfig& c) { return envs::to_string(c.env.kind); },
                 [](RunConfig& c, const std::string& v) { c.env.kind = envs::parse_env_kind(v); }});
    k.push_back({"env", "task", [](const RunConfig& c) { return c.env.task; },
                 [](RunConfig& c, const std::string& v) { c.env.task = v; }});
    k.push_back(CIC_NUM(int, "env", "episode_length", c.env.episode_length));
    k.push_back({"env", "termination", [](const RunConfig& c) { return envs::to_string(c.env.termination); },
                 [](RunConfig& c, const std::string& v) { c.env.termination = envs::parse_termination(v); }});
    k.push_back(CIC_NUM(double, "env", "dt", c.env.physics.dt));
    k.push_back(CIC_NUM(double, "env", "damping", c.env.physics.damping));
    k.push_back(CIC_NUM(double, "env", "force_scale", c.env.physics.force_scale));
    k.push_back(CIC_NUM(double, "env", "start_spread", c.env.physics.start_spread));
    k.push_back(CIC_NUM(double, "env", "cliff_width", c.env.physics.cliff_width));
    k.push_back(CIC_NUM(int, "env", "grid_size", c.env.grid.size));
    k.push_back(CIC_NUM(int, "env", "grid_start_x", c.env.grid.start_x));
    k.push_back(CIC_NUM(int, "env", "grid_start_y", c.env.grid.start_y));
    k.push_back({"env", "grid_encoding", [](const RunConfig& c) { return envs::to_string(c.env.grid.encoding); },
                 [](RunConfig& c, const std::string& v) { c.env.grid.encoding = envs::parse_grid_encoding(v); }});

    k.push_back({"agent", "kind", [](const RunConfig& c) { return to_string(c.agent.kind); },
                 [](RunConfig& c, const std::string& v) { c.agent.kind = parse_agent_kind(v); }});
    k.push_back(CIC_NUM(std::size_t, "agent", "hidden_dim", c.agent.hidden_dim));
    k.push_back(CIC_NUM(std::size_t, "agent", "depth", c.agent.depth));
    k.push_back(CIC_NUM(std::size_t, "agent", "skill_dim", c.agent.skill_dim));
    k.push_back(CIC_NUM(double, "agent", "temperature", c.agent.temperature));
    k.push_back({"agent", "variant", [](const RunConfig& c) { return contrastive::to_string(c.agent.variant); },
                 [](RunConfig& c, const std::string& v) { c.agent.variant = contrastive::parse_reward_variant(v); }});
    k.push_back(CIC_NUM(std::size_t, "agent", "ensemble_size", c.agent.ensemble_size));
    k.push_back(CIC_BOOL("agent", "prediction_head", c.agent.prediction_head));
    k.push_back(CIC_BOOL("agent", "representation_learning", c.agent.representation_learning));
    k.push_back(CIC_NUM(std::size_t, "agent", "skill_period", c.agent.skill_period));
    k.push_back(CIC_NUM(std::size_t, "agent", "knn_k", c.agent.knn_k));
    k.push_back({"agent", "entropy_form", [](const RunConfig& c) { return entropy::to_string(c.agent.entropy_form); },
                 [](RunConfig& c, const std::string& v) { c.agent.entropy_form = entropy::parse_entropy_form(v); }});
    k.push_back(CIC_BOOL("agent", "reward_norm", c.agent.reward_norm));
    k.push_back(CIC_NUM(double, "agent", "lr", c.agent.lr));
    k.push_back(CIC_NUM(std::size_t, "agent", "batch_size", c.agent.batch_size));
    k.push_back(CIC_NUM(std::size_t, "agent", "nstep", c.agent.nstep));
    k.push_back(CIC_NUM(double, "agent", "gamma", c.agent.gamma));
    k.push_back(CIC_NUM(double, "agent", "critic_tau", c.agent.critic_tau));
    k.push_back(CIC_NUM(double, "agent", "stddev", c.agent.stddev));
    k.push_back(CIC_NUM(double, "agent", "stddev_clip", c.agent.stddev_clip));
    k.push_back(CIC_NUM(std::size_t, "agent", "update_every", c.agent.update_every));
    k.push_back(CIC_NUM(std::size_t, "agent", "buffer_capacity", c.agent.buffer_capacity));
    k.push_back(CIC_NUM(std::size_t, "agent", "diayn_skills", c.agent.diayn_skills));
    k.push_back(CIC_NUM(std::size_t, "agent", "diayn_hidden", c.agent.diayn_hidden));
    k.push_back(CIC_NUM(double, "agent", "diayn_lr", c.agent.diayn_lr));
    k.push_back(CIC_NUM(double, "agent", "tabular_alpha", c.agent.tabular_alpha));
    k.push_back(CIC_NUM(double, "agent", "tabular_epsilon", c.agent.tabular_epsilon));

    k.push_back(CIC_NUM(std::uint64_t, "train", "seed", c.train.seed));
    k.push_back(CIC_NUM(std::int64_t, "train", "num_pretrain_steps", c.train.num_pretrain_steps));
    k.push_back(CIC_NUM(std::int64_t, "train", "num_finetune_steps", c.train.num_finetune_steps));
    k.push_back(CIC_NUM(std::int64_t, "train", "seed_frames", c.train.seed_frames));
    k.push_back(CIC_NUM(double, "train", "sweep_step", c.train.sweep_step));
    k.push_back(CIC_NUM(std::int64_t, "train", "sweep_period", c.train.sweep_period));
    k.push_back(CIC_NUM(std::size_t, "train", "eval_episodes", c.train.eval_episodes));
    k.push_back(CIC_NUM(std::int64_t, "train", "log_every", c.train.log_every));
    k.push_back(CIC_NUM(std::size_t, "train", "probe_skills", c.train.probe_skills));
    k.push_back(CIC_NUM(std::size_t, "train", "coverage_skills", c.train.coverage_skills));

    k.push_back(CIC_NUM(std::size_t, "stats", "resamples", c.stats.resamples));
    k.push_back(CIC_NUM(double, "stats", "level", c.stats.level));
    k.push_back(CIC_NUM(std::uint64_t, "stats", "seed", c.stats.seed));
    return k;
  }();
  return keys;
}

#undef CIC_NUM
#undef CIC_BOOL

}  // namespace

std::size_t RunConfig::sweep_candidates() const {
  return static_cast<std::size_t>(std::llround(1.0 / train.sweep_step)) + 1;
}

void RunConfig::validate() const {
  env.validate();
  const auto& a = agent;
  if (a.hidden_dim == 0) throw ConfigError("[agent] hidden_dim must be positive");
  if (a.kind == AgentKind::cic && a.skill_dim == 0 && a.representation_learning) {
    throw ConfigError("[agent] skill_dim must be >= 1 when representation_learning is on");
  }
  if (!(a.temperature > 0.0)) throw ConfigError("[agent] temperature must be > 0");
  if (a.variant == contrastive::RewardVariant::uncertainty && a.ensemble_size < 2) {
    throw ConfigError("[agent] ensemble_size must be >= 2 for the uncertainty variant");
  }
  if (a.skill_period == 0) throw ConfigError("[agent] skill_period must be positive");
  if (a.knn_k == 0) throw ConfigError("[agent] knn_k must be positive");
  if (a.batch_size < 2) throw ConfigError("[agent] batch_size must be >= 2");
  if (a.batch_size <= a.knn_k) throw ConfigError("[agent] batch_size must exceed knn_k");
  if (a.nstep == 0) throw ConfigError("[agent] nstep must be positive");
  if (!(a.gamma >= 0.0 && a.gamma <= 1.0)) throw ConfigError("[agent] gamma must lie in [0, 1]");
  if (!(a.critic_tau >= 0.0 && a.critic_tau <= 1.0)) throw ConfigError("[agent] critic_tau must lie in [0, 1]");
  if (a.update_every == 0) throw ConfigError("[agent] update_every must be positive");
  if (a.buffer_capacity < a.nstep) throw ConfigError("[agent] buffer_capacity must be >= nstep");
  if (a.kind == AgentKind::diayn && a.diayn_skills < 2) throw ConfigError("[agent] diayn_skills must be >= 2");
  if (!(a.lr > 0.0)) throw ConfigError("[agent] lr must be > 0");

  const auto& t = train;
  if (t.num_pretrain_steps < 0) throw ConfigError("[train] num_pretrain_steps must be >= 0");
  if (t.seed_frames < 0) throw ConfigError("[train] seed_frames must be >= 0");
  if (t.seed_frames > t.num_finetune_steps) throw ConfigError("[train] seed_frames must not exceed num_finetune_steps");
  if (!(t.sweep_step > 0.0 && t.sweep_step <= 1.0)) throw ConfigError("[train] sweep_step must lie in (0, 1]");
  const double n = 1.0 / t.sweep_step;
  if (std::abs(n - std::round(n)) > 1e-9) throw ConfigError("[train] sweep_step must divide [0, 1] evenly");
  if (t.sweep_period <= 0) throw ConfigError("[train] sweep_period must be positive");
  if (static_cast<std::int64_t>(sweep_candidates()) * t.sweep_period > t.seed_frames) {
    throw ConfigError("[train] the skill sweep (" + std::to_string(sweep_candidates()) + " candidates x " +
                      std::to_string(t.sweep_period) + " steps) does not fit in seed_frames=" +
                      std::to_string(t.seed_frames));
  }
  if (t.eval_episodes == 0) throw ConfigError("[train] eval_episodes must be positive");
  if (t.log_every <= 0) throw ConfigError("[train] log_every must be positive");
  if (t.probe_skills == 0) throw ConfigError("[train] probe_skills must be positive");
  if (stats.resamples == 0) throw ConfigError("[stats] resamples must be positive");
  if (!(stats.level > 0.0 && stats.level < 1.0)) throw ConfigError("[stats] level must lie in (0, 1)");
}

RunConfig resolve_config(const io::ConfigFile& file) {
  if (!file.has("env", "kind")) throw ConfigError("missing required key [env] kind");
  std::set<std::string> consumed;
  RunConfig cfg;
  // kind first: setters for other keys do not depend on it, but the error
  // for a bad kind should win.
  for (const auto& key : registry()) {
    const auto v = file.get(key.section, key.name);
    if (!v) continue;
    key.set(cfg, *v);
    consumed.insert(key.section + "." + key.name);
  }
  for (const auto& [name, value] : file.values()) {
    if (!consumed.count(name)) {
      const auto dot = name.find('.');
      throw ConfigError("unknown config key [" + name.substr(0, dot) + "] " + name.substr(dot + 1));
    }
  }
  cfg.validate();
  return cfg;
}

std::string render_config(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& key : registry()) {
    if (key.section != section) {
      if (!section.empty()) out << "\n";
      section = key.section;
      out << "[" << section << "]\n";
    }
    out << key.name << " = " << key.get(config) << "\n";
  }
  return out.str();
}

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const auto& k : registry()) out.push_back(k.section + "." + k.name);
  return out;
}

}  // namespace cic::trainer
