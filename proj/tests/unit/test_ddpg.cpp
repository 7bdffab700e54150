#include <gtest/gtest.h>

#include <cmath>

#include "cic/core/errors.hpp"
#include "cic/ddpg/ddpg.hpp"
#include "../support/oracles.hpp"

using namespace cic;
using namespace cic::ddpg;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

DdpgConfig small_config() {
  DdpgConfig c;
  c.obs_dim = 3;
  c.action_dim = 2;
  c.skill_dim = 2;
  c.hidden_dim = 8;
  c.depth = 2;
  return c;
}

// Standard deviation of clamp(X, -c, c) for X ~ N(0, s^2), in closed form.
double clipped_gaussian_stddev(double s, double c) {
  const double u = c / s;
  const double tail = 0.5 * std::erfc(u / std::sqrt(2.0));
  const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI);
  const double inner = s * s * ((1.0 - 2.0 * tail) - 2.0 * u * pdf);
  return std::sqrt(inner + 2.0 * c * c * tail);
}

}  // namespace

TEST(Act, DeterministicWithoutExploration) {
  Rng init(1);
  const ActorCritic ac(small_config(), init);
  Rng a(2), b(3);
  const Vector s = Vector::Constant(3, 0.4), z = Vector::Constant(2, 0.5);
  EXPECT_EQ(act(ac.actor, s, z, a, false, 0.2, 0.3), act(ac.actor, s, z, b, false, 0.2, 0.3));
}

TEST(Act, LargeNoiseContributesExactlyClip) {
  Vector mu(2), noise(2);
  mu << 0.25, -0.5;
  noise << 10.0, -10.0;
  const Vector a = apply_exploration(mu, noise, 0.3);
  EXPECT_EQ(a[0], 0.25 + 0.3);
  EXPECT_EQ(a[1], -0.5 - 0.3);
}

TEST(Act, ActionsStayInBox) {
  Vector mu(2), noise(2);
  mu << 0.95, -0.99;
  noise << 0.3, -0.3;
  const Vector a = apply_exploration(mu, noise, 5.0);
  EXPECT_EQ(a[0], 1.0);
  EXPECT_EQ(a[1], -1.0);
  Rng init(4);
  const ActorCritic ac(small_config(), init);
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Vector s = 100.0 * random_matrix(3, 1, rng).col(0);
    const Vector act_v = act(ac.actor, s, Vector::Zero(2), rng, true, 5.0, 10.0);
    ASSERT_LE(act_v.cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(Act, ExplorationStddevMatchesClippedGaussian) {
  nn::Mlp zero_actor({5, 2}, nn::Activation::tanh);
  Rng rng(6);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector a = act(zero_actor, Vector::Zero(3), Vector::Zero(2), rng, true, 0.2, 0.3);
    sum += a[0];
    sq += a[0] * a[0];
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(sd, clipped_gaussian_stddev(0.2, 0.3), 0.002);
  EXPECT_LT(clipped_gaussian_stddev(0.2, 0.3), 0.2);
}

TEST(Bellman, AffineHandValue) {
  nn::Mlp actor({1, 1}, nn::Activation::tanh);
  nn::Mlp critic({2, 1}, nn::Activation::identity);
  critic.mutable_layers()[0].bias[0] = 2.0;
  const Matrix s_n = Matrix::Zero(1, 1), z(1, 0);
  const Vector y = bellman_targets(actor, critic, s_n, z, Vector::Constant(1, 1.0), Vector::Constant(1, 0.9801));
  EXPECT_DOUBLE_EQ(y[0], 2.9602);
  const Vector y0 = bellman_targets(actor, critic, s_n, z, Vector::Constant(1, 1.5), Vector::Zero(1));
  EXPECT_EQ(y0[0], 1.5);
}

TEST(Bellman, MatchesIndependentRecomputation) {
  Rng init(7);
  const ActorCritic ac(small_config(), init);
  Rng rng(8);
  const Matrix s_n = random_matrix(6, 3, rng), z = random_matrix(6, 2, rng, 0, 1);
  const Vector r = random_matrix(6, 1, rng).col(0), d = random_matrix(6, 1, rng, 0, 1).col(0);
  const Vector y = bellman_targets(ac.actor, ac.critic_target, s_n, z, r, d);
  for (Eigen::Index i = 0; i < 6; ++i) {
    Matrix si = s_n.row(i), zi = z.row(i);
    Matrix in(1, 7);
    in << si, ac.actor.forward(nn::hconcat({&si, &zi})), zi;
    // Batched and single-row products may sum in a different order.
    EXPECT_NEAR(y[i], r[i] + d[i] * ac.critic_target.forward(in)(0, 0), 1e-12);
  }
}

TEST(Critic, NonFiniteTargetIsTrainingError) {
  Rng init(9);
  ActorCritic ac(small_config(), init);
  Rng rng(10);
  const Matrix s = random_matrix(4, 3, rng), a = random_matrix(4, 2, rng), z = random_matrix(4, 2, rng);
  Vector r = Vector::Zero(4);
  r[2] = std::numeric_limits<double>::quiet_NaN();
  try {
    critic_update(ac, s, a, z, r, s, Vector::Ones(4), 42);
    FAIL();
  } catch (const TrainingError& e) {
    EXPECT_EQ(e.step(), 42);
  }
}

class DdpgGradient : public ::testing::TestWithParam<int> {};

TEST_P(DdpgGradient, CriticMatchesFiniteDifferences) {
  DdpgConfig c = small_config();
  c.hidden_dim = 2 + static_cast<std::size_t>(GetParam());
  Rng init(static_cast<std::uint64_t>(20 + GetParam()));
  ActorCritic ac(c, init);
  oracle::jitter_biases(ac.critic, init);
  Rng rng(static_cast<std::uint64_t>(GetParam()));
  const Matrix s = random_matrix(4, 3, rng), a = random_matrix(4, 2, rng), z = random_matrix(4, 2, rng, 0, 1);
  const Vector y = random_matrix(4, 1, rng).col(0);
  const auto lg = critic_loss(ac.critic, s, a, z, y);
  const auto loss = [&] { return critic_loss(ac.critic, s, a, z, y).loss; };
  EXPECT_LT(oracle::relative_error(oracle::flatten(lg.grad), oracle::fd_param_grad(ac.critic, loss)), 1e-5);
}

TEST_P(DdpgGradient, ActorMatchesFiniteDifferencesThroughCritic) {
  DdpgConfig c = small_config();
  c.hidden_dim = 2 + static_cast<std::size_t>(GetParam());
  Rng init(static_cast<std::uint64_t>(40 + GetParam()));
  ActorCritic ac(c, init);
  oracle::jitter_biases(ac.actor, init);
  oracle::jitter_biases(ac.critic, init);
  Rng rng(static_cast<std::uint64_t>(60 + GetParam()));
  const Matrix s = random_matrix(4, 3, rng), z = random_matrix(4, 2, rng, 0, 1);
  const auto q = critic_action_value(ac.critic);
  const auto lg = actor_loss(ac.actor, s, z, q);
  const auto loss = [&] { return actor_loss(ac.actor, s, z, q).loss; };
  EXPECT_LT(oracle::relative_error(oracle::flatten(lg.grad), oracle::fd_param_grad(ac.actor, loss)), 1e-5);
}

INSTANTIATE_TEST_SUITE_P(SmallNets, DdpgGradient, ::testing::Range(0, 7));

TEST(Actor, ConstantCriticGivesZeroGradient) {
  Rng init(11);
  const ActorCritic ac(small_config(), init);
  const ActionValueFn flat = [](const Matrix& s, const Matrix& a, const Matrix&) {
    return ActionValue{Vector::Constant(s.rows(), 3.0), Matrix::Zero(a.rows(), a.cols())};
  };
  Rng rng(12);
  const auto lg = actor_loss(ac.actor, random_matrix(4, 3, rng), random_matrix(4, 2, rng), flat);
  for (double g : oracle::flatten(lg.grad)) EXPECT_EQ(g, 0.0);
}

TEST(Actor, QuadraticCriticDrivesPolicyToOptimum) {
  DdpgConfig c = small_config();
  c.lr = 1e-2;
  Rng init(13);
  ActorCritic ac(c, init);
  const ActionValueFn quad = [](const Matrix&, const Matrix& a, const Matrix&) {
    const Matrix d = a.array() - 0.5;
    return ActionValue{-d.array().square().rowwise().sum().matrix(), -2.0 * d};
  };
  Rng rng(14);
  for (int step = 0; step < 1500; ++step) {
    actor_update(ac.actor, ac.actor_opt, c.lr, random_matrix(16, 3, rng), random_matrix(16, 2, rng, 0, 1), quad, step);
  }
  const Matrix pi = policy(ac.actor, random_matrix(64, 3, rng), random_matrix(64, 2, rng, 0, 1));
  EXPECT_LT((pi.array() - 0.5).abs().maxCoeff(), 0.05);
}

TEST(Actor, FrozenSkillMakesPolicyAFunctionOfState) {
  Rng init(15);
  const ActorCritic ac(small_config(), init);
  Rng rng(16);
  const Matrix s = random_matrix(5, 3, rng);
  const Matrix z = Matrix::Constant(5, 2, 0.3);
  EXPECT_EQ(policy(ac.actor, s, z), policy(ac.actor, s, z));
  const Matrix first = policy(ac.actor, s.topRows(1), z.topRows(1));
  EXPECT_EQ(policy(ac.actor, s, z).row(0), first.row(0));
}

TEST(Target, SyncFromZeroTargetTakesOnePercent) {
  Rng init(17);
  ActorCritic ac(small_config(), init);
  for (auto& l : ac.critic_target.mutable_layers()) {
    l.weight.setZero();
    l.bias.setZero();
  }
  target_sync(ac);
  for (std::size_t i = 0; i < ac.critic.layers().size(); ++i) {
    EXPECT_TRUE(ac.critic_target.layers()[i].weight.isApprox(0.01 * ac.critic.layers()[i].weight, 1e-15));
  }
}

TEST(Target, RepeatedSyncConvergesGeometrically) {
  Rng init(18);
  ActorCritic ac(small_config(), init);
  for (auto& l : ac.critic_target.mutable_layers()) l.weight.setZero();
  const double w = ac.critic.layers()[0].weight(0, 0);
  for (int i = 0; i < 10; ++i) target_sync(ac);
  EXPECT_NEAR(ac.critic_target.layers()[0].weight(0, 0), w * (1.0 - std::pow(0.99, 10)), 1e-14);
  for (int i = 0; i < 3000; ++i) target_sync(ac);
  EXPECT_NEAR(ac.critic_target.layers()[0].weight(0, 0), w, 1e-12);
}

TEST(Bandit, FinetuningDrivesPolicyToOptimum) {
  DdpgConfig c;
  c.obs_dim = 1;
  c.action_dim = 1;
  c.skill_dim = 0;
  c.hidden_dim = 32;
  c.depth = 2;
  c.lr = 1e-3;
  Rng init(19);
  ActorCritic ac(c, init);
  Rng rng(20);
  const Matrix s = Matrix::Zero(64, 1), z(64, 0);
  for (int step = 0; step < 5000; ++step) {
    Matrix a(64, 1);
    for (Eigen::Index i = 0; i < 64; ++i) {
      a(i, 0) = act(ac.actor, s.row(i).transpose(), Vector::Zero(0), rng, true, 0.2, 0.3)[0];
    }
    const Vector r = -a.col(0).array().square().matrix();
    critic_update(ac, s, a, z, r, s, Vector::Zero(64), step);
    actor_update(ac, s, z, step);
    target_sync(ac);
  }
  EXPECT_LT(std::abs(policy(ac.actor, s.topRows(1), z.topRows(1))(0, 0)), 0.05);
}
