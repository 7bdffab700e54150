#include "cic/baselines/diayn.hpp"

#include <cmath>

#include "cic/core/errors.hpp"

namespace cic::baselines {

DiaynHead::DiaynHead(std::size_t obs_dim, std::size_t hidden_dim, std::size_t k, double learning_rate, Rng& rng)
    : num_skills(k), lr(learning_rate) {
  if (k < 2) throw ConfigError("[agent] diayn_skills must be >= 2");
  net = Mlp({obs_dim, hidden_dim, k}, nn::Activation::identity, rng);
  nn::AdamConfig c;
  c.lr = learning_rate;
  opt = nn::AdamState(net, c);
}

Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
    out.row(i) = logits.row(i).array() - lse;
  }
  return out;
}

double diayn_reward(const DiaynHead& head, const Vector& s, std::size_t z) {
  if (z >= head.num_skills) {
    throw ContractError("diayn_reward: skill index " + std::to_string(z) + " out of range for K=" +
                        std::to_string(head.num_skills));
  }
  const Matrix logp = log_softmax_rows(head.net.forward(Matrix(s.transpose())));
  return logp(0, static_cast<Eigen::Index>(z)) + std::log(static_cast<double>(head.num_skills));
}

Vector diayn_rewards(const DiaynHead& head, const Matrix& s, const std::vector<std::size_t>& z) {
  if (static_cast<std::size_t>(s.rows()) != z.size()) throw ContractError("diayn_rewards: label count mismatch");
  const Matrix logp = log_softmax_rows(head.net.forward(s));
  const double log_k = std::log(static_cast<double>(head.num_skills));
  Vector r(s.rows());
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const auto zi = z[static_cast<std::size_t>(i)];
    if (zi >= head.num_skills) throw ContractError("diayn_rewards: skill index out of range");
    r[i] = logp(i, static_cast<Eigen::Index>(zi)) + log_k;
  }
  return r;
}

CrossEntropy diayn_loss(const Mlp& net, const Matrix& s, const std::vector<std::size_t>& labels) {
  if (s.rows() == 0) throw ContractError("diayn_update: empty batch");
  if (static_cast<std::size_t>(s.rows()) != labels.size()) throw ContractError("diayn_loss: label count mismatch");
  nn::ForwardCache cache;
  const Matrix logits = net.forward(s, cache);
  const Matrix logp = log_softmax_rows(logits);
  const double n = static_cast<double>(s.rows());
  Matrix d = logp.array().exp().matrix();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const auto y = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]);
    if (y >= logits.cols()) throw ContractError("diayn_loss: label out of range");
    loss -= logp(i, y);
    d(i, y) -= 1.0;
  }
  d /= n;
  return {loss / n, net.backward(cache, d).params};
}

double diayn_update(DiaynHead& head, const Matrix& s, const std::vector<std::size_t>& labels) {
  auto ce = diayn_loss(head.net, s, labels);
  nn::adam_step(head.net, ce.grad, head.opt, head.lr);
  return ce.loss;
}

std::vector<std::size_t> skill_labels(const Matrix& one_hot) {
  std::vector<std::size_t> out(static_cast<std::size_t>(one_hot.rows()));
  for (Eigen::Index i = 0; i < one_hot.rows(); ++i) {
    Eigen::Index j = 0;
    one_hot.row(i).maxCoeff(&j);
    out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(j);
  }
  return out;
}

}  // namespace cic::baselines
