#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cic/contrastive/contrastive.hpp"
#include "cic/contrastive/intrinsic_reward.hpp"
#include "cic/contrastive/skills.hpp"
#include "cic/contrastive/variational.hpp"
#include "cic/core/errors.hpp"
#include "cic/nn/adam.hpp"
#include "../support/oracles.hpp"

using namespace cic;
using namespace cic::contrastive;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

CicNets small_nets(std::uint64_t seed, bool head, std::size_t ensemble = 0) {
  CicNetsConfig c;
  c.obs_dim = 3;
  c.skill_dim = 4;
  c.embed_dim = 5;
  c.hidden_dim = 8;
  c.depth = 1;
  c.prediction_head = head;
  c.temperature = 0.7;
  c.ensemble_extra = ensemble;
  Rng rng(seed);
  return CicNets(c, rng);
}

Matrix permute_rows(const Matrix& m, const std::vector<int>& perm) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.row(i) = m.row(perm[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

TEST(Skills, UniformMoments) {
  Rng rng(11);
  const int n = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(3), sq = Eigen::VectorXd::Zero(3);
  for (int i = 0; i < n; ++i) {
    const Vector z = sample_skill(rng, 3);
    ASSERT_TRUE((z.array() >= 0.0).all() && (z.array() <= 1.0).all());
    sum += z;
    sq += z.cwiseProduct(z);
  }
  for (int j = 0; j < 3; ++j) {
    const double mean = sum[j] / n;
    const double var = sq[j] / n - mean * mean;
    EXPECT_NEAR(mean, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
    // Var of (U - 1/2)^2 is 1/180.
    EXPECT_NEAR(var, 1.0 / 12.0, 3.0 * std::sqrt(1.0 / 180.0 / n));
  }
}

TEST(Skills, Reproducible) {
  Rng a(4), b(4);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(sample_skill(a, 8), sample_skill(b, 8));
}

TEST(Similarity, IdenticalRowsGiveInverseTemperature) {
  Matrix q(2, 2);
  q << 1.0, 0.0, 0.0, 2.0;
  const Matrix l = logits_from_embeddings(q, q, 0.5);
  EXPECT_EQ(l(0, 0), 2.0);
  EXPECT_EQ(l(1, 1), 2.0);
  EXPECT_EQ(l(0, 1), 0.0);
  EXPECT_EQ(l(1, 0), 0.0);
}

TEST(Similarity, LogitsBoundedByInverseTemperature) {
  const CicNets nets = small_nets(1, true);
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const Matrix l = similarity_matrix(random_matrix(16, 6, rng), random_matrix(16, 4, rng, 0.0, 1.0), nets);
    EXPECT_LE(l.cwiseAbs().maxCoeff(), 1.0 / nets.temperature + 1e-12);
  }
}

TEST(Similarity, ZeroEmbeddingIsFinite) {
  const Matrix z = Matrix::Zero(2, 3);
  const Matrix l = logits_from_embeddings(z, z, 1.0);
  EXPECT_TRUE(l.allFinite());
}

TEST(CicLoss, IdentityLogitsHandValue) {
  const double e = std::exp(1.0);
  EXPECT_NEAR(cross_entropy_diagonal(Matrix::Identity(3, 3)), -std::log(e / (e + 2.0)), 1e-15);
  EXPECT_NEAR(cross_entropy_diagonal(Matrix::Identity(3, 3)), 0.5514, 1e-4);
}

TEST(CicLoss, EqualLogitsGiveLogN) {
  for (const int n : {2, 5, 64}) EXPECT_NEAR(cross_entropy_diagonal(Matrix::Constant(n, n, 0.3)), std::log(n), 1e-13);
}

TEST(CicLoss, BatchOfOneIsContractError) {
  const CicNets nets = small_nets(1, true);
  EXPECT_THROW(cic_loss(Matrix::Zero(1, 6), Matrix::Zero(1, 4), nets), ContractError);
}

TEST(CicLoss, LossMatchesSimilarityMatrix) {
  const CicNets nets = small_nets(3, true);
  Rng rng(4);
  const Matrix tau = random_matrix(6, 6, rng), z = random_matrix(6, 4, rng, 0, 1);
  EXPECT_NEAR(cic_loss(tau, z, nets).loss, cross_entropy_diagonal(similarity_matrix(tau, z, nets)), 1e-13);
}

TEST(CicLoss, CrossEntropyGradMatchesFiniteDifferences) {
  Rng rng(5);
  Matrix l = random_matrix(4, 4, rng, -2, 2);
  const Matrix g = cross_entropy_diagonal_grad(l);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      Matrix up = l, down = l;
      up(i, j) += 1e-6;
      down(i, j) -= 1e-6;
      EXPECT_NEAR(g(i, j), (cross_entropy_diagonal(up) - cross_entropy_diagonal(down)) / 2e-6, 1e-8);
    }
  }
}

class CicGradient : public ::testing::TestWithParam<int> {};

TEST_P(CicGradient, AllBranchesMatchFiniteDifferences) {
  const bool head = GetParam() % 2 == 0;
  CicNets nets = small_nets(static_cast<std::uint64_t>(100 + GetParam()), head);
  Rng rng(static_cast<std::uint64_t>(GetParam()));
  const Matrix tau = random_matrix(4, 6, rng), z = random_matrix(4, 4, rng, 0, 1);
  const auto r = cic_loss(tau, z, nets);
  const auto loss = [&] { return cic_loss(tau, z, nets).loss; };
  EXPECT_LT(oracle::relative_error(oracle::flatten(r.key_grad), oracle::fd_param_grad(nets.key_net, loss)), 1e-5);
  EXPECT_LT(oracle::relative_error(oracle::flatten(r.skill_grad), oracle::fd_param_grad(nets.skill_net, loss)), 1e-5);
  if (head) {
    ASSERT_TRUE(r.head_grad);
    EXPECT_LT(oracle::relative_error(oracle::flatten(*r.head_grad), oracle::fd_param_grad(*nets.prediction_head, loss)),
              1e-5);
  } else {
    EXPECT_FALSE(r.head_grad);
  }
}

INSTANTIATE_TEST_SUITE_P(RandomNets, CicGradient, ::testing::Range(0, 6));

TEST(CicLoss, EnsembleMemberGradientMatchesFiniteDifferences) {
  CicNets nets = small_nets(9, true, 2);
  Rng rng(10);
  const Matrix tau = random_matrix(4, 6, rng), z = random_matrix(4, 4, rng, 0, 1);
  const auto r = ensemble_member_loss(tau, z, nets, 1);
  const auto loss = [&] { return ensemble_member_loss(tau, z, nets, 1).loss; };
  EXPECT_LT(oracle::relative_error(oracle::flatten(r.grad), oracle::fd_param_grad(nets.ensemble[1], loss)), 1e-5);
}

TEST(CicLoss, JointRowPermutationInvariant) {
  const CicNets nets = small_nets(12, true);
  Rng rng(13);
  const Matrix tau = random_matrix(10, 6, rng), z = random_matrix(10, 4, rng, 0, 1);
  std::vector<int> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  EXPECT_NEAR(cic_loss(tau, z, nets).loss, cic_loss(permute_rows(tau, perm), permute_rows(z, perm), nets).loss, 1e-13);
}

TEST(CicLoss, LowerTemperatureLowersLossWithDominantDiagonal) {
  Rng rng(14);
  const Matrix k = random_matrix(8, 5, rng);
  const Matrix q = k + 0.1 * random_matrix(8, 5, rng);
  const Matrix l1 = logits_from_embeddings(q, k, 1.0);
  for (Eigen::Index i = 0; i < 8; ++i) {
    for (Eigen::Index j = 0; j < 8; ++j) {
      if (i != j) {
        ASSERT_GT(l1(i, i), l1(i, j));
      }
    }
  }
  double prev = std::numeric_limits<double>::infinity();
  for (const double t : {2.0, 1.0, 0.5, 0.25, 0.1}) {
    const double loss = cross_entropy_diagonal(logits_from_embeddings(q, k, t));
    EXPECT_LT(loss, prev);
    prev = loss;
  }
}

TEST(CicLoss, TrainingSeparatesMatchedPairs) {
  CicNetsConfig c;
  c.obs_dim = 4;
  c.skill_dim = 4;
  c.embed_dim = 8;
  c.hidden_dim = 32;
  c.depth = 1;
  c.temperature = 0.5;
  Rng init(15);
  CicNets nets(c, init);
  Rng data(16);
  const Matrix a = random_matrix(8, 4, data);
  const auto make = [&](Eigen::Index n, Matrix& tau, Matrix& z) {
    z = random_matrix(n, 4, data, 0, 1);
    tau = z * a.transpose() + 0.01 * random_matrix(n, 8, data);
  };
  nn::AdamState ks(nets.key_net), ss(nets.skill_net), hs(*nets.prediction_head);
  for (int step = 0; step < 400; ++step) {
    Matrix tau, z;
    make(64, tau, z);
    const auto r = cic_loss(tau, z, nets);
    nn::adam_step(nets.key_net, r.key_grad, ks, 1e-3);
    nn::adam_step(nets.skill_net, r.skill_grad, ss, 1e-3);
    nn::adam_step(*nets.prediction_head, *r.head_grad, hs, 1e-3);
  }
  Matrix tau, z;
  make(128, tau, z);
  const Matrix l = similarity_matrix(tau, z, nets);
  Eigen::VectorXd gap(l.rows());
  for (Eigen::Index i = 0; i < l.rows(); ++i) gap[i] = l(i, i) - (l.row(i).sum() - l(i, i)) / (l.cols() - 1);
  const double mean = gap.mean();
  const double se = std::sqrt((gap.array() - mean).square().sum() / (gap.size() - 1) / gap.size());
  EXPECT_GT(mean, 5.0 * se);
}

TEST(Discriminator, EqualValuesScoreZero) {
  EXPECT_NEAR(discriminator_score(Vector::Constant(5, 0.7), 2), 0.0, 1e-15);
}

TEST(Discriminator, HandExample) {
  Vector f(3);
  f << 1.0, 0.0, 0.0;
  const double e = std::exp(1.0);
  EXPECT_NEAR(discriminator_score(f, 0), 1.0 - std::log((e + 2.0) / 3.0), 1e-15);
  EXPECT_NEAR(discriminator_score(f, 0), 0.5472, 1e-4);
}

TEST(Discriminator, NeverExceedsLogN) {
  Rng rng(17);
  for (const int n : {1, 2, 16, 256}) {
    for (int t = 0; t < 50; ++t) {
      const Matrix l = random_matrix(n, n, rng, -50, 50);
      ASSERT_LE(mean_discriminator_score(l), std::log(static_cast<double>(n)));
      const Vector s = discriminator_scores(l);
      for (Eigen::Index i = 0; i < s.size(); ++i) ASSERT_LE(s[i], std::log(static_cast<double>(n)));
    }
  }
  // A perfectly separated batch approaches the bound from below.
  const Matrix sharp = 1e6 * Matrix::Identity(16, 16);
  EXPECT_LE(mean_discriminator_score(sharp), std::log(16.0));
  EXPECT_NEAR(mean_discriminator_score(sharp), std::log(16.0), 1e-12);
}

TEST(IntrinsicReward, EntropyVariantIsEntropyModuleOutput) {
  const CicNets nets = small_nets(18, true);
  Rng rng(19);
  const Matrix tau = random_matrix(20, 6, rng), z = random_matrix(20, 4, rng, 0, 1);
  const EntropySettings es{5, entropy::EntropyForm::log1p_mean};
  const Matrix h = nets.keys(tau);
  EXPECT_EQ(intrinsic_reward(RewardVariant::entropy, tau, z, nets, es),
            entropy::particle_entropy_reward(h, h, 5, es.form, true));
}

TEST(IntrinsicReward, SimilarityWithIdenticalEmbeddingsAddsOne) {
  CicNets nets;
  nets.temperature = 1.0;
  nets.key_net = nn::Mlp({2, 2}, nn::Activation::identity);
  nets.skill_net = nn::Mlp({2, 2}, nn::Activation::identity);
  nets.key_net.mutable_layers()[0].weight = Matrix::Identity(2, 2);
  nets.skill_net.mutable_layers()[0].weight = Matrix::Identity(2, 2);
  Matrix x(5, 2);
  x << 1, 0, 0, 4, 2, 0, 0, 0.5, 8, 0;
  const EntropySettings es{2, entropy::EntropyForm::log1p_mean};
  const Vector base = intrinsic_reward(RewardVariant::entropy, x, x, nets, es);
  const Vector sim = intrinsic_reward(RewardVariant::similarity, x, x, nets, es);
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_EQ(sim[i], base[i] + 1.0);
}

TEST(IntrinsicReward, IdenticalEnsembleAddsZero) {
  CicNets nets = small_nets(20, true, 3);
  for (auto& m : nets.ensemble) m = nets.skill_net;
  Rng rng(21);
  const Matrix tau = random_matrix(20, 6, rng), z = random_matrix(20, 4, rng, 0, 1);
  const EntropySettings es;
  EXPECT_EQ(intrinsic_reward(RewardVariant::uncertainty, tau, z, nets, es),
            intrinsic_reward(RewardVariant::entropy, tau, z, nets, es));
}

TEST(IntrinsicReward, UnknownVariantIsConfigError) {
  EXPECT_THROW(parse_reward_variant("curiosity"), ConfigError);
}

TEST(IntrinsicReward, DiscriminatorAddsScores) {
  const CicNets nets = small_nets(22, false);
  Rng rng(23);
  const Matrix tau = random_matrix(16, 6, rng), z = random_matrix(16, 4, rng, 0, 1);
  const EntropySettings es;
  EXPECT_EQ(intrinsic_reward(RewardVariant::discriminator, tau, z, nets, es),
            intrinsic_reward(RewardVariant::entropy, tau, z, nets, es) +
                discriminator_scores(similarity_matrix(tau, z, nets)));
}

namespace {

DiscreteJoint random_joint(Rng& rng, Eigen::Index nt, Eigen::Index nz) {
  DiscreteJoint j;
  j.p = Matrix(nt, nz);
  for (Eigen::Index a = 0; a < nt; ++a) {
    for (Eigen::Index b = 0; b < nz; ++b) j.p(a, b) = rng.uniform() < 0.2 ? 0.0 : std::pow(rng.uniform(), 3.0);
  }
  j.p(0, 0) += 0.01;
  j.p /= j.p.sum();
  return j;
}

}  // namespace

TEST(VariationalBound, IndependentJointHasZeroInformation) {
  DiscreteJoint j;
  Eigen::VectorXd a(3), b(2);
  a << 0.2, 0.3, 0.5;
  b << 0.25, 0.75;
  j.p = a * b.transpose();
  EXPECT_NEAR(mutual_information(j), 0.0, 1e-15);
}

TEST(VariationalBound, DeterministicJointHasEntropyInformation) {
  DiscreteJoint j;
  j.p = Matrix::Identity(4, 4) / 4.0;
  EXPECT_NEAR(mutual_information(j), std::log(4.0), 1e-15);
  EXPECT_NEAR(entropy_z(j), std::log(4.0), 1e-15);
}

TEST(VariationalBound, NeverExceedsInformationAndIsTightAtOptimum) {
  Rng rng(24);
  for (int t = 0; t < 100; ++t) {
    const auto nt = static_cast<Eigen::Index>(1 + rng.index(8));
    const auto nz = static_cast<Eigen::Index>(1 + rng.index(8));
    const DiscreteJoint j = random_joint(rng, nt, nz);
    const double mi = mutual_information(j);
    TabularPosterior q;
    for (const std::size_t steps : {0, 1, 10, 200}) {
      TabularPosterior fitted = q;
      fitted.fit(j, steps, 2.0);
      ASSERT_LE(variational_bound(j, fitted.probabilities()), mi + 1e-9);
    }
    EXPECT_NEAR(variational_bound(j, true_posterior(j)), mi, 1e-6);
  }
}

TEST(VariationalBound, FittingApproachesInformation) {
  Rng rng(25);
  const DiscreteJoint j = random_joint(rng, 6, 5);
  TabularPosterior q;
  q.fit(j, 20000, 2.0);
  EXPECT_NEAR(variational_bound(j, q.probabilities()), mutual_information(j), 1e-4);
}
