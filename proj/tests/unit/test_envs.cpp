#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "cic/core/errors.hpp"
#include "cic/envs/gridworld.hpp"
#include "cic/envs/pointmass.hpp"
#include "../support/oracles.hpp"

using namespace cic;
using namespace cic::envs;

namespace {

EnvSpec pointmass_spec() {
  EnvSpec s;
  s.kind = EnvKind::pointmass;
  s.task = "reach_ne";
  return s;
}

EnvSpec grid_spec() {
  EnvSpec s;
  s.kind = EnvKind::gridworld;
  s.task = "reach_corner";
  s.grid.encoding = GridEncoding::onehot;
  return s;
}

}  // namespace

TEST(Pointmass, ResetIsDeterministicWithZeroVelocity) {
  const PointmassPhysics ph;
  const auto a = pointmass_reset(ph, 17);
  const auto b = pointmass_reset(ph, 17);
  EXPECT_EQ(a.position, b.position);
  EXPECT_EQ(a.velocity[0], 0.0);
  EXPECT_EQ(a.velocity[1], 0.0);
  EXPECT_LE(std::abs(a.position[0]), ph.start_spread);
  const auto c = pointmass_reset(ph, 18);
  EXPECT_NE(a.position, c.position);
}

TEST(Pointmass, ZeroActionFromRestStaysPut) {
  const EnvSpec spec = pointmass_spec();
  PointmassState st;
  st.position = {0.2, -0.3};
  const std::array<double, 2> a{0.0, 0.0};
  const auto res = pointmass_step(spec, st, a);
  EXPECT_EQ(st.position[0], 0.2);
  EXPECT_EQ(st.position[1], -0.3);
  EXPECT_DOUBLE_EQ(res.extrinsic_reward, -std::hypot(1.0 - 0.2, 1.0 + 0.3));
}

TEST(Pointmass, OneStepHandIntegration) {
  EnvSpec spec = pointmass_spec();
  spec.physics.damping = 0.0;
  spec.physics.dt = 0.1;
  PointmassState st;
  const std::array<double, 2> a{1.0, 0.0};
  pointmass_step(spec, st, a);
  EXPECT_NEAR(st.velocity[0], 0.1, 1e-15);
  EXPECT_NEAR(st.position[0], 0.01, 1e-15);
  EXPECT_EQ(st.position[1], 0.0);
}

TEST(Pointmass, ActionsAreClamped) {
  const EnvSpec spec = pointmass_spec();
  PointmassState a, b;
  const std::array<double, 2> big{5.0, 0.0};
  const std::array<double, 2> unit{1.0, 0.0};
  pointmass_step(spec, a, big);
  pointmass_step(spec, b, unit);
  EXPECT_EQ(a.position, b.position);
  EXPECT_EQ(a.velocity, b.velocity);
}

TEST(Pointmass, StaysInArenaAndWallZeroesVelocity) {
  const EnvSpec spec = pointmass_spec();
  PointmassState st;
  const std::array<double, 2> a{1.0, 1.0};
  for (int i = 0; i < 400; ++i) {
    pointmass_step(spec, st, a);
    ASSERT_LE(std::abs(st.position[0]), 1.0);
    ASSERT_LE(std::abs(st.position[1]), 1.0);
    ASSERT_TRUE(std::isfinite(st.velocity[0]));
  }
  EXPECT_EQ(st.position[0], 1.0);
  EXPECT_EQ(st.velocity[0], 0.0);
}

TEST(Pointmass, FixedLengthNeverTerminatesEarly) {
  const EnvSpec spec = pointmass_spec();
  Pointmass env(spec);
  Rng rng(1);
  env.reset(rng);
  Rng act(2);
  for (int t = 1; t <= spec.episode_length; ++t) {
    const std::array<double, 2> a{act.uniform(-1, 1), act.uniform(-1, 1)};
    const auto res = env.step(a);
    EXPECT_EQ(res.terminated, t == spec.episode_length);
    EXPECT_FALSE(res.failure);
  }
}

TEST(Pointmass, EarlyTerminationEndsNoLaterThanFixedLength) {
  EnvSpec spec = pointmass_spec();
  spec.termination = TerminationMode::early_termination;
  Pointmass env(spec);
  Rng rng(1);
  env.reset(rng);
  int steps = 0;
  bool failed = false;
  for (;;) {
    const std::array<double, 2> a{1.0, 0.2};
    const auto res = env.step(a);
    ++steps;
    if (res.terminated) {
      failed = res.failure;
      break;
    }
  }
  EXPECT_LE(steps, spec.episode_length);
  EXPECT_TRUE(failed);
  EXPECT_LT(steps, spec.episode_length);
}

TEST(Pointmass, RunTaskRewardsSpeedAlongX) {
  EnvSpec spec = pointmass_spec();
  spec.task = "run_x";
  PointmassState st;
  const std::array<double, 2> a{1.0, 0.0};
  const auto res = pointmass_step(spec, st, a);
  EXPECT_DOUBLE_EQ(res.extrinsic_reward, st.velocity[0]);
}

TEST(EnvSpec, UnknownTaskListsValidTasks) {
  EnvSpec spec = pointmass_spec();
  spec.task = "fly";
  try {
    spec.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("reach_nw"), std::string::npos);
  }
}

TEST(Gridworld, WallsBlockAndMovesAreUnit) {
  const GridLayout layout;
  GridState s{0, 0, 0};
  EXPECT_EQ(gridworld_transition(layout, s, Move::left).x, 0);
  const auto r = gridworld_transition(layout, s, Move::right);
  EXPECT_EQ(r.x, 1);
  EXPECT_EQ(r.y, 0);
  EXPECT_EQ(gridworld_transition(layout, s, Move::down).y, 0);
  GridState top{9, 9, 0};
  EXPECT_EQ(gridworld_transition(layout, top, Move::up).y, 9);
  EXPECT_EQ(gridworld_transition(layout, top, Move::right).x, 9);
}

TEST(Gridworld, TransitionIsPure) {
  const GridLayout layout;
  for (int x = 0; x < 10; ++x) {
    for (int m = 0; m < kNumMoves; ++m) {
      const GridState s{x, 3, 5};
      EXPECT_EQ(gridworld_transition(layout, s, static_cast<Move>(m)),
                gridworld_transition(layout, s, static_cast<Move>(m)));
    }
  }
}

TEST(Gridworld, OneHotObservation) {
  Gridworld env(grid_spec());
  Rng rng(0);
  const Vector obs = env.reset(rng);
  ASSERT_EQ(obs.size(), 100);
  EXPECT_EQ(obs.sum(), 1.0);
  EXPECT_EQ(obs[cell_index(env.spec().grid, 4, 4)], 1.0);
}

TEST(Gridworld, RandomWalkIsReproducible) {
  const auto walk = [](std::uint64_t seed) {
    Gridworld env(grid_spec());
    Rng r(seed);
    env.reset(r);
    std::vector<int> cells;
    for (int t = 0; t < 100; ++t) {
      env.step_discrete(static_cast<Move>(r.index(kNumMoves)));
      cells.push_back(env.cell());
    }
    std::sort(cells.begin(), cells.end());
    return cells;
  };
  EXPECT_EQ(walk(5), walk(5));
}

TEST(Coverage, EmptyLogIsZero) { EXPECT_EQ(coverage(std::span<const Vector>{}), 0.0); }

TEST(Coverage, FirstRowIsTenPercent) {
  const GridLayout layout;
  std::vector<Vector> obs;
  for (int x = 0; x < 10; ++x) obs.push_back(gridworld_onehot(layout, {x, 0, 0}));
  EXPECT_DOUBLE_EQ(coverage(obs), 0.10);
}

TEST(Coverage, NonOneHotIsContractError) {
  std::vector<Vector> obs{Vector::Constant(100, 0.5)};
  EXPECT_THROW(coverage(obs), ContractError);
}

TEST(Coverage, MatchesSetOracleOnLongRandomWalk) {
  Gridworld env(grid_spec());
  Rng r(12);
  env.reset(r);
  std::vector<Vector> obs;
  std::vector<int> cells;
  for (int t = 0; t < 50000; ++t) {
    const auto res = env.step_discrete(static_cast<Move>(r.index(kNumMoves)));
    obs.push_back(res.next_obs);
    cells.push_back(env.cell());
    if (res.terminated) env.reset(r);
  }
  EXPECT_DOUBLE_EQ(coverage(obs), oracle::set_coverage(cells, 100));
}

TEST(Gridworld, ActionRelaxationPicksDominantAxis) {
  const std::array<double, 2> right{0.9, 0.1}, up{0.1, -0.0}, down{0.0, -0.7};
  EXPECT_EQ(move_from_action(right), Move::right);
  EXPECT_EQ(move_from_action(up), Move::right);
  EXPECT_EQ(move_from_action(down), Move::down);
}
