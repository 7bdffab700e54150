#pragma once

#include <cstddef>

#include "cic/nn/mlp.hpp"

namespace cic::contrastive {

using nn::Matrix;

// Joint p(tau, z) over finite supports: rows index tau, columns index z.
struct DiscreteJoint {
  Matrix p;
  void validate() const;
  Eigen::VectorXd marginal_tau() const;
  Eigen::VectorXd marginal_z() const;
};

double entropy_z(const DiscreteJoint& joint);
// Exact I(tau; z) by enumeration.
double mutual_information(const DiscreteJoint& joint);
// Row-normalized p(z | tau); rows with zero mass become uniform.
Matrix true_posterior(const DiscreteJoint& joint);
// H(z) + E_p[log q(z | tau)] with q given row-wise over z.
double variational_bound(const DiscreteJoint& joint, const Matrix& q);

// Tabular q(z | tau) = softmax(logits row), fitted by gradient ascent on
// each row's conditional log-likelihood. Deterministic given the joint.
// Converges for lr < 4.
struct TabularPosterior {
  Matrix logits;
  Matrix probabilities() const;
  void fit(const DiscreteJoint& joint, std::size_t steps, double lr);
};

}  // namespace cic::contrastive
