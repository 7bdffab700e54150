#include "cic/trainer/agent.hpp"

#include <cmath>
#include <string>

#include "cic/contrastive/skills.hpp"
#include "cic/core/errors.hpp"

namespace cic::trainer {

std::size_t policy_skill_dim(const RunConfig& config) {
  switch (config.agent.kind) {
    case AgentKind::cic:
      return config.agent.skill_dim;
    case AgentKind::apt:
      return 0;
    case AgentKind::diayn:
      return config.agent.diayn_skills;
  }
  return 0;
}

Agent::Agent(const RunConfig& config, Rng rng) : config_(config), skill_dim_(policy_skill_dim(config)) {
  const auto& a = config.agent;
  const std::size_t obs = config.env.obs_dim();
  ddpg::DdpgConfig dc;
  dc.obs_dim = obs;
  dc.action_dim = config.env.action_dim();
  dc.skill_dim = skill_dim_;
  dc.hidden_dim = a.hidden_dim;
  dc.depth = a.depth;
  dc.lr = a.lr;
  dc.critic_tau = a.critic_tau;
  dc.stddev = a.stddev;
  dc.stddev_clip = a.stddev_clip;
  Rng ddpg_rng = rng.split("ddpg");
  ac_ = ddpg::ActorCritic(dc, ddpg_rng);

  if (a.kind == AgentKind::cic || a.kind == AgentKind::apt) {
    contrastive::CicNetsConfig nc;
    nc.obs_dim = obs;
    nc.skill_dim = skill_dim_;
    // The embedding width follows the configured skill dim for both agents
    // so apt and a skill-free cic build the same transition encoder.
    nc.embed_dim = a.skill_dim == 0 ? 16 : a.skill_dim;
    nc.hidden_dim = a.hidden_dim;
    nc.depth = a.depth;
    nc.prediction_head = a.kind == AgentKind::cic && a.prediction_head;
    nc.temperature = a.temperature;
    nc.ensemble_extra =
        (a.kind == AgentKind::cic && a.variant == contrastive::RewardVariant::uncertainty) ? a.ensemble_size - 1 : 0;
    Rng cic_rng = rng.split("cic");
    nets_ = contrastive::CicNets(nc, cic_rng);
    if (a.kind == AgentKind::cic && a.representation_learning) {
      nn::AdamConfig ac;
      ac.lr = a.lr;
      RepresentationOptimizers opt{nn::AdamState(nets_->key_net, ac), nn::AdamState(nets_->skill_net, ac), {}, {}};
      if (nets_->prediction_head) opt.head = nn::AdamState(*nets_->prediction_head, ac);
      for (const auto& m : nets_->ensemble) opt.ensemble.emplace_back(m, ac);
      rep_opt_ = std::move(opt);
    }
  } else {
    Rng head_rng = rng.split("diayn");
    diayn_ = baselines::DiaynHead(obs, a.diayn_hidden, a.diayn_skills, a.diayn_lr, head_rng);
  }
}

replay::BufferShape Agent::buffer_shape() const {
  return {config_.env.obs_dim(), config_.env.action_dim(), skill_dim_};
}

Vector Agent::sample_skill(Rng& rng) const {
  switch (kind()) {
    case AgentKind::cic:
      return contrastive::sample_skill(rng, skill_dim_);
    case AgentKind::apt:
      return Vector(0);
    case AgentKind::diayn:
      return contrastive::one_hot_skill(rng.index(skill_dim_), skill_dim_);
  }
  return Vector(0);
}

Vector Agent::act(const Vector& obs, const Vector& z, Rng& rng, bool explore) const {
  return ddpg::act(ac_.actor, obs, z, rng, explore, config_.agent.stddev, config_.agent.stddev_clip);
}

Matrix Agent::policy(const Matrix& s, const Matrix& z) const { return ddpg::policy(ac_.actor, s, z); }

Vector Agent::raw_intrinsic(const Matrix& s, const Matrix& s_n, const Matrix& z) const {
  if (diayn_) return baselines::diayn_rewards(*diayn_, s_n, baselines::skill_labels(z));
  const contrastive::EntropySettings es{config_.agent.knn_k, config_.agent.entropy_form};
  const Matrix tau = contrastive::make_tau(s, s_n);
  if (kind() == AgentKind::apt) return contrastive::entropy_reward(tau, *nets_, es);
  return contrastive::intrinsic_reward(config_.agent.variant, tau, z, *nets_, es);
}

Vector Agent::peek_intrinsic(const replay::Batch& batch) const {
  Vector r = raw_intrinsic(batch.s, batch.s_n, batch.z);
  if (config_.agent.reward_norm && !diayn_) {
    entropy::RewardNormalizer copy = normalizer_;
    r = copy.normalize(r);
  }
  return r;
}

double Agent::update_representation(const Matrix& tau, const Matrix& z, std::int64_t step) {
  auto& opt = *rep_opt_;
  auto& nets = *nets_;
  const auto res = contrastive::cic_loss(tau, z, nets);
  if (!std::isfinite(res.loss)) throw TrainingError("non-finite contrastive loss", step);
  const double lr = config_.agent.lr;
  nn::adam_step(nets.key_net, res.key_grad, opt.key, lr);
  nn::adam_step(nets.skill_net, res.skill_grad, opt.skill, lr);
  if (res.head_grad) nn::adam_step(*nets.prediction_head, *res.head_grad, *opt.head, lr);
  for (std::size_t m = 0; m < nets.ensemble.size(); ++m) {
    const auto em = contrastive::ensemble_member_loss(tau, z, nets, m);
    nn::adam_step(nets.ensemble[m], em.grad, opt.ensemble[m], lr);
  }
  return res.loss;
}

void Agent::update_policy(const replay::Batch& b, const Vector& reward, std::int64_t step, UpdateMetrics& m) {
  m.critic_loss = ddpg::critic_update(ac_, b.s, b.a, b.z, reward, b.s_n, b.discount, step);
  m.actor_loss = ddpg::actor_update(ac_, b.s, b.z, step);
  ddpg::target_sync(ac_);
  ++updates_;
}

UpdateMetrics Agent::update_intrinsic(const replay::Batch& b, std::int64_t step) {
  UpdateMetrics m;
  if (diayn_) {
    const auto labels = baselines::skill_labels(b.z);
    m.cic_loss = baselines::diayn_update(*diayn_, b.s_n, labels);
  } else if (rep_opt_) {
    m.cic_loss = update_representation(contrastive::make_tau(b.s, b.s_n), b.z, step);
  }
  Vector r = raw_intrinsic(b.s, b.s_n, b.z);
  if (!r.allFinite()) throw TrainingError("non-finite intrinsic reward", step);
  if (config_.agent.reward_norm && !diayn_) r = normalizer_.normalize(r);
  m.intrinsic_mean = r.mean();
  update_policy(b, r, step, m);
  return m;
}

UpdateMetrics Agent::update_extrinsic(const replay::Batch& b, std::int64_t step) {
  UpdateMetrics m;
  if (!b.reward.allFinite()) throw TrainingError("non-finite extrinsic reward", step);
  update_policy(b, b.reward, step, m);
  return m;
}

nn::ArrayMap Agent::export_arrays() const {
  nn::ArrayMap out;
  nn::export_mlp(ac_.actor, "actor", out);
  nn::export_mlp(ac_.critic, "critic", out);
  nn::export_mlp(ac_.critic_target, "critic_target", out);
  nn::export_adam(ac_.actor_opt, "actor_opt", out);
  nn::export_adam(ac_.critic_opt, "critic_opt", out);
  if (nets_) {
    nn::export_mlp(nets_->key_net, "cic/key_net", out);
    nn::export_mlp(nets_->skill_net, "cic/skill_net", out);
    if (nets_->prediction_head) nn::export_mlp(*nets_->prediction_head, "cic/head", out);
    for (std::size_t m = 0; m < nets_->ensemble.size(); ++m) {
      nn::export_mlp(nets_->ensemble[m], "cic/ensemble/" + std::to_string(m), out);
    }
  }
  if (rep_opt_) {
    nn::export_adam(rep_opt_->key, "cic_opt/key_net", out);
    nn::export_adam(rep_opt_->skill, "cic_opt/skill_net", out);
    if (rep_opt_->head) nn::export_adam(*rep_opt_->head, "cic_opt/head", out);
    for (std::size_t m = 0; m < rep_opt_->ensemble.size(); ++m) {
      nn::export_adam(rep_opt_->ensemble[m], "cic_opt/ensemble/" + std::to_string(m), out);
    }
  }
  if (diayn_) {
    nn::export_mlp(diayn_->net, "diayn/net", out);
    nn::export_adam(diayn_->opt, "diayn/opt", out);
  }
  out["normalizer/mean"] = nn::scalar_tensor(normalizer_.mean());
  out["normalizer/initialized"] = nn::scalar_tensor(normalizer_.initialized() ? 1.0 : 0.0);
  out["agent/updates"] = nn::scalar_tensor(static_cast<double>(updates_));
  return out;
}

void Agent::import_arrays(const nn::ArrayMap& in) {
  nn::import_mlp(ac_.actor, "actor", in);
  nn::import_mlp(ac_.critic, "critic", in);
  nn::import_mlp(ac_.critic_target, "critic_target", in);
  nn::import_adam(ac_.actor_opt, "actor_opt", in);
  nn::import_adam(ac_.critic_opt, "critic_opt", in);
  if (nets_) {
    nn::import_mlp(nets_->key_net, "cic/key_net", in);
    nn::import_mlp(nets_->skill_net, "cic/skill_net", in);
    if (nets_->prediction_head) nn::import_mlp(*nets_->prediction_head, "cic/head", in);
    for (std::size_t m = 0; m < nets_->ensemble.size(); ++m) {
      nn::import_mlp(nets_->ensemble[m], "cic/ensemble/" + std::to_string(m), in);
    }
  }
  if (rep_opt_) {
    nn::import_adam(rep_opt_->key, "cic_opt/key_net", in);
    nn::import_adam(rep_opt_->skill, "cic_opt/skill_net", in);
    if (rep_opt_->head) nn::import_adam(*rep_opt_->head, "cic_opt/head", in);
    for (std::size_t m = 0; m < rep_opt_->ensemble.size(); ++m) {
      nn::import_adam(rep_opt_->ensemble[m], "cic_opt/ensemble/" + std::to_string(m), in);
    }
  }
  if (diayn_) {
    nn::import_mlp(diayn_->net, "diayn/net", in);
    nn::import_adam(diayn_->opt, "diayn/opt", in);
  }
  const auto scalar = [&](const std::string& name) {
    const auto& t = nn::require_array(in, name);
    if (t.data.size() != 1) throw CorruptionError("array '" + name + "' must hold one value");
    return t.data[0];
  };
  normalizer_.restore(scalar("normalizer/mean"), scalar("normalizer/initialized") != 0.0);
  updates_ = static_cast<std::int64_t>(scalar("agent/updates"));
}

}  // namespace cic::trainer
