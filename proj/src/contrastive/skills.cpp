#include "cic/contrastive/skills.hpp"

#include "cic/core/errors.hpp"

namespace cic::contrastive {

Vector sample_skill(Rng& rng, std::size_t dim) {
  Vector z(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.uniform();
  return z;
}

Vector constant_skill(double v, std::size_t dim) { return Vector::Constant(static_cast<Eigen::Index>(dim), v); }

Vector one_hot_skill(std::size_t index, std::size_t k) {
  if (index >= k) throw ContractError("skill index " + std::to_string(index) + " out of range for K=" + std::to_string(k));
  Vector z = Vector::Zero(static_cast<Eigen::Index>(k));
  z[static_cast<Eigen::Index>(index)] = 1.0;
  return z;
}

}  // namespace cic::contrastive
