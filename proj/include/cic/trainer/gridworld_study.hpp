#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cic/trainer/run_config.hpp"

namespace cic::trainer {

struct CoverageRow {
  std::string agent;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::int64_t steps = 0;
  double coverage = 0.0;
};

struct StudyOptions {
  std::vector<std::size_t> diayn_ks{4, 16, 100};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::int64_t steps = 50000;
  bool include_cic = true;
  std::size_t jobs = 1;
};

// Cells visited by a uniform random walk of `steps` moves from the start.
std::vector<int> random_walk_cells(const envs::GridLayout& layout, std::int64_t steps, Rng rng);

// Fraction of grid cells visited by the greedy skill rollouts after
// training for `steps` environment steps. With steps == 0 both agents
// report the random-walk coverage of the seed-frame phase.
CoverageRow diayn_coverage(const RunConfig& base, std::size_t k, std::uint64_t seed, std::int64_t steps);
CoverageRow cic_coverage(const RunConfig& base, std::uint64_t seed, std::int64_t steps);

// Rows ordered by (agent, K, seed) as listed in the options.
std::vector<CoverageRow> gridworld_study(const RunConfig& base, const StudyOptions& options);

}  // namespace cic::trainer
