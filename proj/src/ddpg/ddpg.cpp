#include "cic/ddpg/ddpg.hpp"

#include <algorithm>
#include <cmath>

#include "cic/core/errors.hpp"

namespace cic::ddpg {

ActorCritic::ActorCritic(const DdpgConfig& c, Rng& rng) : config(c) {
  Rng actor_rng = rng.split("actor");
  Rng critic_rng = rng.split("critic");
  actor = Mlp(nn::mlp_dims(c.obs_dim + c.skill_dim, c.hidden_dim, c.depth, c.action_dim), nn::Activation::tanh,
              actor_rng);
  critic = Mlp(nn::mlp_dims(c.obs_dim + c.action_dim + c.skill_dim, c.hidden_dim, c.depth, 1),
               nn::Activation::identity, critic_rng);
  critic_target = critic;
  nn::AdamConfig opt;
  opt.lr = c.lr;
  actor_opt = nn::AdamState(actor, opt);
  critic_opt = nn::AdamState(critic, opt);
}

Matrix actor_input(const Matrix& s, const Matrix& z) { return nn::hconcat({&s, &z}); }

Matrix critic_input(const Matrix& s, const Matrix& a, const Matrix& z) { return nn::hconcat({&s, &a, &z}); }

Matrix policy(const Mlp& actor, const Matrix& s, const Matrix& z) { return actor.forward(actor_input(s, z)); }

Vector apply_exploration(const Vector& mu, const Vector& noise, double clip) {
  Vector a(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    a[i] = std::clamp(mu[i] + std::clamp(noise[i], -clip, clip), -1.0, 1.0);
  }
  return a;
}

Vector act(const Mlp& actor, const Vector& s, const Vector& z, Rng& rng, bool explore, double stddev, double clip) {
  Matrix sm = s.transpose();
  Matrix zm = z.transpose();
  Vector mu = policy(actor, sm, zm).row(0).transpose();
  if (!explore) return mu.cwiseMax(-1.0).cwiseMin(1.0);
  Vector noise(mu.size());
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = stddev * rng.normal();
  return apply_exploration(mu, noise, clip);
}

Vector bellman_targets(const Mlp& actor, const Mlp& critic_target, const Matrix& s_n, const Matrix& z,
                       const Vector& reward, const Vector& discount) {
  const Matrix a_n = policy(actor, s_n, z);
  const Matrix q_n = critic_target.forward(critic_input(s_n, a_n, z));
  return reward + discount.cwiseProduct(q_n.col(0));
}

LossAndGrad critic_loss(const Mlp& critic, const Matrix& s, const Matrix& a, const Matrix& z, const Vector& targets) {
  nn::ForwardCache cache;
  const Matrix q = critic.forward(critic_input(s, a, z), cache);
  const Vector diff = q.col(0) - targets;
  const double n = static_cast<double>(diff.size());
  LossAndGrad out;
  out.loss = diff.squaredNorm() / n;
  Matrix dq = (2.0 / n) * diff;
  out.grad = critic.backward(cache, dq).params;
  return out;
}

ActionValueFn critic_action_value(const Mlp& critic) {
  return [&critic](const Matrix& s, const Matrix& a, const Matrix& z) {
    nn::ForwardCache cache;
    const Matrix q = critic.forward(critic_input(s, a, z), cache);
    const Matrix ones = Matrix::Ones(q.rows(), 1);
    const Matrix d_in = critic.backward_input(cache, ones);
    return ActionValue{q.col(0), d_in.middleCols(s.cols(), a.cols())};
  };
}

LossAndGrad actor_loss(const Mlp& actor, const Matrix& s, const Matrix& z, const ActionValueFn& q) {
  nn::ForwardCache cache;
  const Matrix a = actor.forward(actor_input(s, z), cache);
  const ActionValue av = q(s, a, z);
  const double n = static_cast<double>(s.rows());
  LossAndGrad out;
  out.loss = -av.q.sum() / n;
  out.grad = actor.backward(cache, -av.dq_da / n).params;
  return out;
}

double critic_update(ActorCritic& ac, const Matrix& s, const Matrix& a, const Matrix& z, const Vector& reward,
                     const Matrix& s_n, const Vector& discount, std::int64_t step) {
  const Vector y = bellman_targets(ac.actor, ac.critic_target, s_n, z, reward, discount);
  if (!y.allFinite()) throw TrainingError("non-finite Bellman target", step);
  auto lg = critic_loss(ac.critic, s, a, z, y);
  if (!std::isfinite(lg.loss)) throw TrainingError("non-finite critic loss", step);
  nn::adam_step(ac.critic, lg.grad, ac.critic_opt, ac.config.lr);
  return lg.loss;
}

double actor_update(Mlp& actor, nn::AdamState& opt, double lr, const Matrix& s, const Matrix& z,
                    const ActionValueFn& q, std::int64_t step) {
  auto lg = actor_loss(actor, s, z, q);
  if (!std::isfinite(lg.loss)) throw TrainingError("non-finite actor loss", step);
  nn::adam_step(actor, lg.grad, opt, lr);
  return lg.loss;
}

double actor_update(ActorCritic& ac, const Matrix& s, const Matrix& z, std::int64_t step) {
  return actor_update(ac.actor, ac.actor_opt, ac.config.lr, s, z, critic_action_value(ac.critic), step);
}

void target_sync(ActorCritic& ac) { nn::polyak_update(ac.critic_target, ac.critic, ac.config.critic_tau); }

}  // namespace cic::ddpg
