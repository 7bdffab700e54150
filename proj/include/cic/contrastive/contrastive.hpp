#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cic/core/rng.hpp"
#include "cic/nn/mlp.hpp"

namespace cic::contrastive {

using nn::Matrix;
using nn::Mlp;
using nn::Vector;

inline constexpr double kNormEpsilon = 1e-8;

struct CicNetsConfig {
  std::size_t obs_dim = 4;
  std::size_t skill_dim = 16;
  // Both branches end at this width.
  std::size_t embed_dim = 16;
  std::size_t hidden_dim = 128;
  std::size_t depth = 2;
  bool prediction_head = true;
  double temperature = 0.5;
  // Skill encoders beyond the primary one, for the uncertainty reward.
  std::size_t ensemble_extra = 0;
};

// Transition encoder (key), skill encoder (query) and the optional
// prediction head applied to the skill branch.
struct CicNets {
  CicNets() = default;
  CicNets(const CicNetsConfig& config, Rng& rng);

  Mlp key_net;
  Mlp skill_net;
  std::optional<Mlp> prediction_head;
  std::vector<Mlp> ensemble;
  double temperature = 0.5;

  // g_psi1(tau) with tau rows = concat(s, s').
  Matrix keys(const Matrix& tau) const;
  // prediction_head(g_psi2(z)), or g_psi2(z) without the head.
  Matrix queries(const Matrix& z) const;
  Matrix queries_with(const Mlp& skill_encoder, const Matrix& z) const;
};

Matrix make_tau(const Matrix& s, const Matrix& s_next);

// Row-wise x / max(||x||, eps).
Matrix normalize_rows(const Matrix& x);
// Backward of normalize_rows given the raw input and dL/d(normalized).
Matrix normalize_rows_backward(const Matrix& x, const Matrix& grad_normalized);

// logits[i][j] = <q_i, k_j> / T with unit-normalized rows.
Matrix logits_from_embeddings(const Matrix& queries, const Matrix& keys, double temperature);
Matrix similarity_matrix(const Matrix& tau, const Matrix& z, const CicNets& nets);

// Mean over rows of softmax cross-entropy with diagonal labels.
double cross_entropy_diagonal(const Matrix& logits);
// dLoss/dlogits for cross_entropy_diagonal.
Matrix cross_entropy_diagonal_grad(const Matrix& logits);

struct CicLossResult {
  double loss = 0.0;
  nn::Gradients key_grad;
  nn::Gradients skill_grad;
  std::optional<nn::Gradients> head_grad;
};

// Skill-anchored InfoNCE over the batch; gradients for key, skill and head.
CicLossResult cic_loss(const Matrix& tau, const Matrix& z, const CicNets& nets);

// Same loss where the query side uses member of the ensemble.
struct EnsembleLossResult {
  double loss = 0.0;
  nn::Gradients grad;
};
EnsembleLossResult ensemble_member_loss(const Matrix& tau, const Matrix& z, const CicNets& nets, std::size_t member);

// f(tau, z) - log (1/N) sum_j exp f(tau_j, z), where f_values holds the N
// similarity terms for one skill and positive indexes the matching one.
double discriminator_score(const Vector& f_values, Eigen::Index positive);
// Per-row scores on a square logit matrix with diagonal positives.
Vector discriminator_scores(const Matrix& logits);
// Batch mean of discriminator_scores; never exceeds ln N.
double mean_discriminator_score(const Matrix& logits);

double log_mean_exp(const Vector& x);

}  // namespace cic::contrastive
