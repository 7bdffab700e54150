#pragma once

#include <optional>
#include <string>

#include "cic/io/checkpoint.hpp"
#include "cic/io/config_file.hpp"
#include "cic/trainer/agent.hpp"

namespace cic::trainer {

// "# init_scheme = ..." followed by the fully-resolved config.
std::string config_echo(const RunConfig& config);

io::Checkpoint make_checkpoint(const Agent& agent, const std::optional<Vector>& selected_skill = std::nullopt);

struct LoadedAgent {
  RunConfig config;
  Agent agent;
  std::optional<Vector> selected_skill;
};

// Rebuilds the agent from the echoed config. Overrides may change run
// settings (task, budgets, seed) but never the network shapes.
LoadedAgent load_agent(const io::Checkpoint& ckpt, const io::ConfigFile& overrides = {});

}  // namespace cic::trainer
