#include "cic/contrastive/contrastive.hpp"

#include <cmath>

#include "cic/core/errors.hpp"

namespace cic::contrastive {

CicNets::CicNets(const CicNetsConfig& c, Rng& rng) : temperature(c.temperature) {
  if (!(c.temperature > 0.0)) throw ConfigError("[agent] temperature must be > 0");
  if (c.embed_dim == 0) throw ConfigError("[agent] embedding width must be positive");
  Rng key_rng = rng.split("key_net");
  Rng skill_rng = rng.split("skill_net");
  Rng head_rng = rng.split("prediction_head");
  key_net = Mlp(nn::mlp_dims(2 * c.obs_dim, c.hidden_dim, c.depth, c.embed_dim), nn::Activation::identity, key_rng);
  if (c.skill_dim > 0) {
    skill_net =
        Mlp(nn::mlp_dims(c.skill_dim, c.hidden_dim, c.depth, c.embed_dim), nn::Activation::identity, skill_rng);
    if (c.prediction_head) {
      prediction_head =
          Mlp(nn::mlp_dims(c.embed_dim, c.hidden_dim, c.depth, c.embed_dim), nn::Activation::identity, head_rng);
    }
    for (std::size_t m = 0; m < c.ensemble_extra; ++m) {
      Rng member_rng = rng.split("ensemble").split(m);
      ensemble.emplace_back(nn::mlp_dims(c.skill_dim, c.hidden_dim, c.depth, c.embed_dim), nn::Activation::identity,
                            member_rng);
    }
  }
}

Matrix CicNets::keys(const Matrix& tau) const { return key_net.forward(tau); }

Matrix CicNets::queries_with(const Mlp& skill_encoder, const Matrix& z) const {
  Matrix q = skill_encoder.forward(z);
  if (prediction_head) q = prediction_head->forward(q);
  return q;
}

Matrix CicNets::queries(const Matrix& z) const { return queries_with(skill_net, z); }

Matrix make_tau(const Matrix& s, const Matrix& s_next) { return nn::hconcat({&s, &s_next}); }

Matrix normalize_rows(const Matrix& x) {
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double n = std::max(x.row(i).norm(), kNormEpsilon);
    y.row(i) = x.row(i) / n;
  }
  return y;
}

Matrix normalize_rows_backward(const Matrix& x, const Matrix& g) {
  Matrix dx(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double n = x.row(i).norm();
    if (n > kNormEpsilon) {
      const auto y = x.row(i) / n;
      dx.row(i) = (g.row(i) - y * y.dot(g.row(i))) / n;
    } else {
      dx.row(i) = g.row(i) / kNormEpsilon;
    }
  }
  return dx;
}

Matrix logits_from_embeddings(const Matrix& queries, const Matrix& keys, double temperature) {
  if (queries.cols() != keys.cols()) throw ContractError("query and key embeddings differ in width");
  return normalize_rows(queries) * normalize_rows(keys).transpose() / temperature;
}

Matrix similarity_matrix(const Matrix& tau, const Matrix& z, const CicNets& nets) {
  if (tau.rows() != z.rows()) throw ContractError("similarity_matrix: transition and skill batches differ in size");
  return logits_from_embeddings(nets.queries(z), nets.keys(tau), nets.temperature);
}

double log_mean_exp(const Vector& x) {
  const double m = x.maxCoeff();
  return m + std::log((x.array() - m).exp().sum()) - std::log(static_cast<double>(x.size()));
}

double cross_entropy_diagonal(const Matrix& logits) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
    total += lse - logits(i, i);
  }
  return total / static_cast<double>(logits.rows());
}

Matrix cross_entropy_diagonal_grad(const Matrix& logits) {
  const auto n = logits.rows();
  Matrix g(n, logits.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = logits.row(i).maxCoeff();
    const auto e = (logits.row(i).array() - m).exp();
    g.row(i) = (e / e.sum()).matrix();
    g(i, i) -= 1.0;
  }
  return g / static_cast<double>(n);
}

namespace {

struct ContrastiveCore {
  double loss;
  Matrix d_queries;
  Matrix d_keys;
};

ContrastiveCore contrastive_core(const Matrix& q, const Matrix& k, double temperature) {
  const Matrix qn = normalize_rows(q);
  const Matrix kn = normalize_rows(k);
  const Matrix logits = qn * kn.transpose() / temperature;
  const auto n = logits.rows();
  // Softmax and the loss share one pass over the logits.
  Matrix dlogits(n, n);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = logits.row(i).maxCoeff();
    dlogits.row(i) = (logits.row(i).array() - m).exp().matrix();
    const double sum = dlogits.row(i).sum();
    loss += m + std::log(sum) - logits(i, i);
    dlogits.row(i) /= sum;
    dlogits(i, i) -= 1.0;
  }
  dlogits /= static_cast<double>(n);
  const Matrix dqn = dlogits * kn / temperature;
  const Matrix dkn = dlogits.transpose() * qn / temperature;
  return {loss / static_cast<double>(n), normalize_rows_backward(q, dqn), normalize_rows_backward(k, dkn)};
}

void check_batch(const Matrix& tau, const Matrix& z) {
  if (tau.rows() != z.rows()) throw ContractError("cic_loss: transition and skill batches differ in size");
  if (tau.rows() < 2) throw ContractError("cic_loss: batch needs at least two rows (one negative)");
}

}  // namespace

CicLossResult cic_loss(const Matrix& tau, const Matrix& z, const CicNets& nets) {
  check_batch(tau, z);
  nn::ForwardCache key_cache, skill_cache, head_cache;
  const Matrix keys = nets.key_net.forward(tau, key_cache);
  Matrix queries = nets.skill_net.forward(z, skill_cache);
  if (nets.prediction_head) queries = nets.prediction_head->forward(queries, head_cache);

  const ContrastiveCore core = contrastive_core(queries, keys, nets.temperature);
  CicLossResult r;
  r.loss = core.loss;
  r.key_grad = nets.key_net.backward(key_cache, core.d_keys).params;
  Matrix d_skill_out = core.d_queries;
  if (nets.prediction_head) {
    auto head = nets.prediction_head->backward(head_cache, core.d_queries);
    r.head_grad = std::move(head.params);
    d_skill_out = std::move(head.input);
  }
  r.skill_grad = nets.skill_net.backward(skill_cache, d_skill_out).params;
  return r;
}

EnsembleLossResult ensemble_member_loss(const Matrix& tau, const Matrix& z, const CicNets& nets, std::size_t member) {
  check_batch(tau, z);
  if (member >= nets.ensemble.size()) throw ContractError("ensemble member index out of range");
  const Mlp& encoder = nets.ensemble[member];
  nn::ForwardCache skill_cache, head_cache;
  const Matrix keys = nets.key_net.forward(tau);
  Matrix queries = encoder.forward(z, skill_cache);
  if (nets.prediction_head) queries = nets.prediction_head->forward(queries, head_cache);
  const ContrastiveCore core = contrastive_core(queries, keys, nets.temperature);
  Matrix d = core.d_queries;
  if (nets.prediction_head) d = nets.prediction_head->backward(head_cache, d).input;
  return {core.loss, encoder.backward(skill_cache, d).params};
}

namespace {

// f(tau, z) - max - log sum exp(f - max): non-positive by construction in
// floating point, so adding ln N afterwards cannot exceed ln N.
double score_excess(const Vector& f, Eigen::Index positive) {
  const double m = f.maxCoeff();
  const double log_sum = std::log((f.array() - m).exp().sum());
  return (f[positive] - m) - log_sum;
}

}  // namespace

double discriminator_score(const Vector& f_values, Eigen::Index positive) {
  if (f_values.size() < 1) throw ContractError("discriminator_score: needs at least one similarity term");
  if (positive < 0 || positive >= f_values.size()) throw ContractError("discriminator_score: positive index out of range");
  return score_excess(f_values, positive) + std::log(static_cast<double>(f_values.size()));
}

Vector discriminator_scores(const Matrix& logits) {
  if (logits.rows() != logits.cols()) throw ContractError("discriminator_scores: logits must be square");
  Vector out(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) out[i] = discriminator_score(logits.row(i).transpose(), i);
  return out;
}

double mean_discriminator_score(const Matrix& logits) {
  if (logits.rows() != logits.cols() || logits.rows() < 1) {
    throw ContractError("mean_discriminator_score: logits must be square and non-empty");
  }
  double excess = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) excess += score_excess(logits.row(i).transpose(), i);
  return excess / static_cast<double>(logits.rows()) + std::log(static_cast<double>(logits.rows()));
}

}  // namespace cic::contrastive
