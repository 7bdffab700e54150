#include "cic/contrastive/variational.hpp"

#include <cmath>

#include "cic/core/errors.hpp"

namespace cic::contrastive {

void DiscreteJoint::validate() const {
  if (p.rows() < 1 || p.cols() < 1) throw ContractError("joint distribution is empty");
  if ((p.array() < 0.0).any() || !p.allFinite()) throw ContractError("joint distribution has invalid entries");
  if (std::abs(p.sum() - 1.0) > 1e-12) throw ContractError("joint distribution does not sum to one");
}

Eigen::VectorXd DiscreteJoint::marginal_tau() const { return p.rowwise().sum(); }

Eigen::VectorXd DiscreteJoint::marginal_z() const { return p.colwise().sum().transpose(); }

double entropy_z(const DiscreteJoint& joint) {
  joint.validate();
  double h = 0.0;
  for (double pz : joint.marginal_z()) {
    if (pz > 0.0) h -= pz * std::log(pz);
  }
  return h;
}

double mutual_information(const DiscreteJoint& joint) {
  joint.validate();
  const auto pt = joint.marginal_tau();
  const auto pz = joint.marginal_z();
  double mi = 0.0;
  for (Eigen::Index i = 0; i < joint.p.rows(); ++i) {
    for (Eigen::Index j = 0; j < joint.p.cols(); ++j) {
      const double pij = joint.p(i, j);
      if (pij > 0.0) mi += pij * std::log(pij / (pt[i] * pz[j]));
    }
  }
  return mi;
}

Matrix true_posterior(const DiscreteJoint& joint) {
  joint.validate();
  Matrix q(joint.p.rows(), joint.p.cols());
  const auto pt = joint.marginal_tau();
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    if (pt[i] > 0.0) {
      q.row(i) = joint.p.row(i) / pt[i];
    } else {
      q.row(i).setConstant(1.0 / static_cast<double>(q.cols()));
    }
  }
  return q;
}

double variational_bound(const DiscreteJoint& joint, const Matrix& q) {
  if (q.rows() != joint.p.rows() || q.cols() != joint.p.cols()) {
    throw ContractError("variational_bound: posterior shape does not match the joint");
  }
  double ll = 0.0;
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      const double pij = joint.p(i, j);
      if (pij > 0.0) ll += pij * std::log(q(i, j));
    }
  }
  return entropy_z(joint) + ll;
}

Matrix TabularPosterior::probabilities() const {
  Matrix q(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    q.row(i) = (logits.row(i).array() - m).exp().matrix();
    q.row(i) /= q.row(i).sum();
  }
  return q;
}

void TabularPosterior::fit(const DiscreteJoint& joint, std::size_t steps, double lr) {
  joint.validate();
  if (logits.rows() != joint.p.rows() || logits.cols() != joint.p.cols()) {
    logits = Matrix::Zero(joint.p.rows(), joint.p.cols());
  }
  const auto pt = joint.marginal_tau();
  for (std::size_t s = 0; s < steps; ++s) {
    const Matrix q = probabilities();
    // Row i ascends sum_j p(z_j | tau_i) log q_ij, whose gradient is
    // p(z | tau_i) - q_i. Scaling by 1 / p(tau_i) keeps the step size
    // stable for rare and common rows alike.
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      if (pt[i] > 0.0) logits.row(i) += lr * (joint.p.row(i) / pt[i] - q.row(i));
    }
  }
}

}  // namespace cic::contrastive
