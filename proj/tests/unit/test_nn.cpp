#include <gtest/gtest.h>

#include <cmath>

#include "cic/core/errors.hpp"
#include "cic/nn/adam.hpp"
#include "cic/nn/mlp.hpp"
#include "cic/nn/tensor_io.hpp"
#include "../support/oracles.hpp"

using namespace cic;
using namespace cic::nn;

namespace {

Mlp identity_layer(Activation act) {
  Mlp net({2, 2}, act);
  net.mutable_layers()[0].weight = Matrix::Identity(2, 2);
  return net;
}

Matrix row(std::initializer_list<double> v) {
  Matrix m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

}  // namespace

TEST(MlpForward, IdentityLayerPassesInput) {
  const Mlp net = identity_layer(Activation::identity);
  const Matrix y = net.forward(row({1.0, -2.0}));
  EXPECT_EQ(y(0, 0), 1.0);
  EXPECT_EQ(y(0, 1), -2.0);
}

TEST(MlpForward, ReluOutputClampsNegatives) {
  const Mlp net = identity_layer(Activation::relu);
  const Matrix y = net.forward(row({1.0, -2.0}));
  EXPECT_EQ(y(0, 0), 1.0);
  EXPECT_EQ(y(0, 1), 0.0);
}

TEST(MlpForward, TwoLayerMatchesHandEvaluation) {
  Mlp net({2, 2, 1}, Activation::identity);
  auto& l = net.mutable_layers();
  l[0].weight << 0.5, -1.0, 2.0, 0.25;
  l[0].bias << 0.1, -0.2;
  l[1].weight << 1.5, -0.5;
  l[1].bias << 0.3;
  // x = (1, 2): h = relu(0.5 - 2 + 0.1, 2 + 0.5 - 0.2) = (0, 2.3); y = -1.15 + 0.3.
  const Matrix y = net.forward(row({1.0, 2.0}));
  EXPECT_NEAR(y(0, 0), -0.85, 1e-15);
}

TEST(MlpForward, DimensionMismatchNamesLayer) {
  const Mlp net({3, 4, 1}, Activation::identity);
  try {
    net.forward(row({1.0, 2.0}));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("layer 0"), std::string::npos);
  }
}

TEST(MlpForward, IsBitDeterministic) {
  Rng rng(11);
  const Mlp net({5, 8, 8, 3}, Activation::tanh, rng);
  const Matrix x = Matrix::Random(4, 5);
  const Matrix a = net.forward(x);
  const Matrix b = net.forward(x);
  EXPECT_TRUE((a.array() == b.array()).all());
}

TEST(MlpBackward, ZeroOutputGradGivesZeroParams) {
  Rng rng(2);
  const Mlp net({3, 4, 2}, Activation::identity, rng);
  ForwardCache cache;
  net.forward(Matrix::Random(2, 3), cache);
  const auto r = net.backward(cache, Matrix::Zero(2, 2));
  for (const auto& l : r.params.layers) {
    EXPECT_TRUE((l.weight.array() == 0.0).all());
    EXPECT_TRUE((l.bias.array() == 0.0).all());
  }
}

TEST(MlpBackward, ScalarLayerGradientIsInput) {
  Rng rng(3);
  Mlp net({1, 1}, Activation::identity, rng);
  ForwardCache cache;
  net.forward(row({0.7}), cache);
  const auto r = net.backward(cache, Matrix::Ones(1, 1));
  EXPECT_DOUBLE_EQ(r.params.layers[0].weight(0, 0), 0.7);
  EXPECT_DOUBLE_EQ(r.params.layers[0].bias(0), 1.0);
}

TEST(MlpBackward, StaleCacheIsInternalError) {
  Rng rng(4);
  Mlp net({2, 3, 1}, Activation::identity, rng);
  ForwardCache cache;
  net.forward(Matrix::Random(2, 2), cache);
  net.mutable_layers()[0].bias(0) += 1.0;
  EXPECT_THROW(net.backward(cache, Matrix::Ones(2, 1)), InternalError);
}

class MlpGradientCheck : public ::testing::TestWithParam<int> {};

TEST_P(MlpGradientCheck, MatchesCentralDifferences) {
  Rng rng(static_cast<std::uint64_t>(100 + GetParam()));
  const std::size_t in = 1 + rng.index(6);
  const std::size_t hidden = 1 + rng.index(8);
  const std::size_t out = 1 + rng.index(4);
  const Activation act = GetParam() % 2 ? Activation::tanh : Activation::identity;
  Mlp net({in, hidden, hidden, out}, act, rng);
  oracle::jitter_biases(net, rng);
  const Eigen::Index batch = 1 + static_cast<Eigen::Index>(rng.index(4));
  Matrix x(batch, static_cast<Eigen::Index>(in));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.0, 1.0);
  Matrix w(batch, static_cast<Eigen::Index>(out));
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-1.0, 1.0);
  const auto loss = [&] { return (net.forward(x).array() * w.array()).sum(); };

  ForwardCache cache;
  net.forward(x, cache);
  const auto analytic = oracle::flatten(net.backward(cache, w).params);
  const auto numeric = oracle::fd_param_grad(net, loss);
  EXPECT_LT(oracle::relative_error(analytic, numeric), 1e-5);

  // Input gradient too.
  ForwardCache c2;
  net.forward(x, c2);
  const Matrix dx = net.backward_input(c2, w);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double orig = x.data()[i];
    x.data()[i] = orig + 1e-6;
    const double up = loss();
    x.data()[i] = orig - 1e-6;
    const double down = loss();
    x.data()[i] = orig;
    EXPECT_NEAR(dx.data()[i], (up - down) / 2e-6, 1e-6);
  }
}

INSTANTIATE_TEST_SUITE_P(RandomNets, MlpGradientCheck, ::testing::Range(0, 12));

TEST(Adam, ZeroGradientLeavesParamsAndAdvancesStep) {
  Rng rng(5);
  Mlp net({2, 3, 1}, Activation::identity, rng);
  const Mlp before = net;
  AdamState st(net);
  adam_step(net, net.zero_gradients(), st, 0.1);
  EXPECT_TRUE(net == before);
  EXPECT_EQ(st.t, 1);
}

TEST(Adam, FirstStepOnScalarMovesByLearningRate) {
  Mlp net({1, 1}, Activation::identity);
  AdamState st(net);
  auto g = net.zero_gradients();
  g.layers[0].weight(0, 0) = 1.0;
  adam_step(net, g, st, 0.1);
  // m_hat = 1, v_hat = 1 -> step = 0.1 / (1 + 1e-8).
  EXPECT_NEAR(net.layers()[0].weight(0, 0), -0.1 / (1.0 + 1e-8), 1e-15);
}

TEST(Adam, IdenticalGradientsGiveIdenticalBiasCorrectedDeltas) {
  Mlp net({1, 1}, Activation::identity);
  AdamState st(net);
  auto g = net.zero_gradients();
  g.layers[0].weight(0, 0) = 0.5;
  adam_step(net, g, st, 0.01);
  const double first = net.layers()[0].weight(0, 0);
  adam_step(net, g, st, 0.01);
  const double second = net.layers()[0].weight(0, 0) - first;
  // With constant g both bias-corrected moments equal g and g^2 exactly.
  EXPECT_NEAR(first, second, 1e-15);
}

TEST(Adam, NonFiniteGradientCarriesStep) {
  Mlp net({1, 1}, Activation::identity);
  AdamState st(net);
  auto g = net.zero_gradients();
  adam_step(net, g, st, 0.1);
  g.layers[0].bias(0) = std::nan("");
  try {
    adam_step(net, g, st, 0.1);
    FAIL();
  } catch (const TrainingError& e) {
    EXPECT_EQ(e.step(), 2);
  }
}

TEST(Adam, ShapeMismatchIsConfigError) {
  Mlp a({1, 1}, Activation::identity);
  Mlp b({2, 1}, Activation::identity);
  AdamState st(a);
  EXPECT_THROW(adam_step(a, b.zero_gradients(), st, 0.1), ConfigError);
}

TEST(Polyak, RateOneCopiesAndRateZeroKeeps) {
  Rng rng(6);
  const Mlp online({2, 4, 1}, Activation::identity, rng);
  Mlp target({2, 4, 1}, Activation::identity);
  const Mlp zero = target;
  polyak_update(target, online, 0.0);
  EXPECT_TRUE(target == zero);
  polyak_update(target, online, 1.0);
  EXPECT_TRUE(target == online);
}

TEST(Polyak, AffineFormula) {
  Mlp online({2, 2}, Activation::identity);
  for (auto& l : online.mutable_layers()) {
    l.weight.setOnes();
    l.bias.setOnes();
  }
  Mlp target({2, 2}, Activation::identity);
  polyak_update(target, online, 0.01);
  EXPECT_TRUE((target.layers()[0].weight.array() == 0.01).all());
  EXPECT_TRUE((target.layers()[0].bias.array() == 0.01).all());
}

TEST(Polyak, IsAContractionTowardOnline) {
  Rng rng(7);
  const Mlp online({3, 5, 2}, Activation::identity, rng);
  Mlp target({3, 5, 2}, Activation::identity, rng);
  const Mlp before = target;
  polyak_update(target, online, 0.3);
  for (std::size_t l = 0; l < online.layers().size(); ++l) {
    const auto after = (target.layers()[l].weight - online.layers()[l].weight).array().abs();
    const auto prior = (before.layers()[l].weight - online.layers()[l].weight).array().abs();
    EXPECT_TRUE((after <= 0.7 * prior + 1e-15).all());
  }
}

TEST(Polyak, ArchitectureMismatchIsConfigError) {
  Mlp a({2, 3, 1}, Activation::identity);
  Mlp b({2, 4, 1}, Activation::identity);
  EXPECT_THROW(polyak_update(a, b, 0.5), ConfigError);
}

TEST(Architecture, ResolvesPlaceholders) {
  EXPECT_EQ(parse_architecture("in->1024->1024->64", 8, 64), (std::vector<std::size_t>{8, 1024, 1024, 64}));
  EXPECT_EQ(parse_architecture("in -> 128 -> out", 4, 2), (std::vector<std::size_t>{4, 128, 2}));
  EXPECT_THROW(parse_architecture("in->x->out", 4, 2), ConfigError);
  EXPECT_EQ(mlp_dims(6, 32, 2, 3), (std::vector<std::size_t>{6, 32, 32, 3}));
}

TEST(TensorIo, MlpRoundTrip) {
  Rng rng(8);
  const Mlp net({3, 4, 2}, Activation::tanh, rng);
  ArrayMap arrays;
  export_mlp(net, "net", arrays);
  Mlp copy({3, 4, 2}, Activation::tanh);
  import_mlp(copy, "net", arrays);
  EXPECT_TRUE(copy == net);
  for (const auto& [name, t] : arrays) EXPECT_TRUE(t.valid()) << name;
  Mlp wrong({3, 5, 2}, Activation::tanh);
  EXPECT_THROW(import_mlp(wrong, "net", arrays), CorruptionError);
}
