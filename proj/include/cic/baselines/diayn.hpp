#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cic/core/rng.hpp"
#include "cic/nn/adam.hpp"
#include "cic/nn/mlp.hpp"

namespace cic::baselines {

using nn::Matrix;
using nn::Mlp;
using nn::Vector;

// Classifier q(z | s) over K discrete skills with a uniform prior.
struct DiaynHead {
  DiaynHead() = default;
  DiaynHead(std::size_t obs_dim, std::size_t hidden_dim, std::size_t num_skills, double lr, Rng& rng);

  Mlp net;
  nn::AdamState opt;
  std::size_t num_skills = 0;
  double lr = 1e-4;
};

Matrix log_softmax_rows(const Matrix& logits);

// log q(z | s) - log(1 / K).
double diayn_reward(const DiaynHead& head, const Vector& s, std::size_t z);
Vector diayn_rewards(const DiaynHead& head, const Matrix& s, const std::vector<std::size_t>& z);

struct CrossEntropy {
  double loss = 0.0;
  nn::Gradients grad;
};
CrossEntropy diayn_loss(const Mlp& net, const Matrix& s, const std::vector<std::size_t>& labels);

// One Adam step of multiclass cross-entropy; returns the pre-step loss.
double diayn_update(DiaynHead& head, const Matrix& s, const std::vector<std::size_t>& labels);

// Row-wise argmax of one-hot skill rows.
std::vector<std::size_t> skill_labels(const Matrix& one_hot);

}  // namespace cic::baselines
