#include "cic/trainer/gridworld_study.hpp"

#include <functional>
#include <mutex>
#include <thread>

#include "cic/baselines/tabular_diayn.hpp"
#include "cic/envs/gridworld.hpp"
#include "cic/trainer/trainer.hpp"

namespace cic::trainer {

namespace {

RunConfig study_config(const RunConfig& base, std::uint64_t seed) {
  RunConfig c = base;
  c.env.kind = envs::EnvKind::gridworld;
  c.env.task = "reach_corner";
  c.env.termination = envs::TerminationMode::fixed_length;
  c.train.seed = seed;
  return c;
}

double seed_phase_coverage(const RunConfig& c) {
  const auto cells = random_walk_cells(c.env.grid, c.train.seed_frames, Rng(c.train.seed).split("random_walk"));
  return envs::coverage_of_cells(cells, c.env.grid.size * c.env.grid.size);
}

}  // namespace

std::vector<int> random_walk_cells(const envs::GridLayout& layout, std::int64_t steps, Rng rng) {
  envs::GridState s = envs::gridworld_reset(layout, 0);
  std::vector<int> cells;
  cells.reserve(static_cast<std::size_t>(steps));
  for (std::int64_t t = 0; t < steps; ++t) {
    s = envs::gridworld_transition(layout, s, static_cast<envs::Move>(rng.index(envs::kNumMoves)));
    cells.push_back(envs::cell_index(layout, s.x, s.y));
  }
  return cells;
}

CoverageRow diayn_coverage(const RunConfig& base, std::size_t k, std::uint64_t seed, std::int64_t steps) {
  RunConfig c = study_config(base, seed);
  c.env.grid.encoding = envs::GridEncoding::onehot;
  CoverageRow row{"diayn", k, seed, steps, 0.0};
  if (steps == 0) {
    row.coverage = seed_phase_coverage(c);
    return row;
  }
  baselines::TabularDiaynConfig tc;
  tc.num_skills = k;
  tc.alpha = c.agent.tabular_alpha;
  tc.gamma = c.agent.gamma;
  tc.epsilon = c.agent.tabular_epsilon;
  tc.head_hidden = c.agent.diayn_hidden;
  tc.head_lr = c.agent.diayn_lr;
  tc.update_every = c.agent.update_every;
  tc.skill_period = c.agent.skill_period;
  Rng rng = Rng(seed).split("diayn");
  Rng init_rng = rng.split("init");
  baselines::TabularDiayn agent(tc, c.env.grid, init_rng);
  envs::Gridworld env(c.env);
  Rng train_rng = rng.split("train");
  agent.train(env, steps, train_rng);

  std::vector<int> cells;
  for (std::size_t z = 0; z < k; ++z) {
    envs::GridState s = envs::gridworld_reset(c.env.grid, seed);
    cells.push_back(envs::cell_index(c.env.grid, s.x, s.y));
    for (int t = 0; t < c.env.episode_length; ++t) {
      s = envs::gridworld_transition(c.env.grid, s, agent.greedy(z, envs::cell_index(c.env.grid, s.x, s.y)));
      cells.push_back(envs::cell_index(c.env.grid, s.x, s.y));
    }
  }
  row.coverage = envs::coverage_of_cells(cells, c.env.grid.size * c.env.grid.size);
  return row;
}

CoverageRow cic_coverage(const RunConfig& base, std::uint64_t seed, std::int64_t steps) {
  RunConfig c = study_config(base, seed);
  c.env.grid.encoding = envs::GridEncoding::coords;
  c.agent.kind = AgentKind::cic;
  c.train.num_pretrain_steps = steps;
  CoverageRow row{"cic", c.train.coverage_skills, seed, steps, 0.0};
  if (steps == 0) {
    row.coverage = seed_phase_coverage(c);
    return row;
  }
  const Agent agent = pretrain(c);
  envs::Gridworld env(c.env);
  Rng skill_rng = Rng(seed).split("coverage_skills");
  Rng reset_rng(0);
  Rng unused(0);
  std::vector<int> cells;
  for (std::size_t i = 0; i < c.train.coverage_skills; ++i) {
    const Vector z = agent.sample_skill(skill_rng);
    Vector obs = env.reset(reset_rng);
    cells.push_back(env.cell());
    for (;;) {
      const Vector a = agent.act(obs, z, unused, false);
      const auto res = env.step({a.data(), static_cast<std::size_t>(a.size())});
      cells.push_back(env.cell());
      obs = res.next_obs;
      if (res.terminated) break;
    }
  }
  row.coverage = envs::coverage_of_cells(cells, c.env.grid.size * c.env.grid.size);
  return row;
}

std::vector<CoverageRow> gridworld_study(const RunConfig& base, const StudyOptions& options) {
  std::vector<std::function<CoverageRow()>> jobs;
  if (options.include_cic) {
    for (auto seed : options.seeds) jobs.push_back([&, seed] { return cic_coverage(base, seed, options.steps); });
  }
  for (auto k : options.diayn_ks) {
    for (auto seed : options.seeds) {
      jobs.push_back([&, k, seed] { return diayn_coverage(base, k, seed, options.steps); });
    }
  }
  std::vector<CoverageRow> rows(jobs.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.jobs, jobs.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) rows[i] = jobs[i]();
    return rows;
  }
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= jobs.size() || failure) return;
          i = next++;
        }
        try {
          rows[i] = jobs[i]();
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace cic::trainer
