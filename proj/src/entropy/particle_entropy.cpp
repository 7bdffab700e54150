#include "cic/entropy/particle_entropy.hpp"

#include <algorithm>
#include <cmath>

#include "cic/core/errors.hpp"

namespace cic::entropy {

std::string to_string(EntropyForm f) { return f == EntropyForm::log1p_mean ? "log1p_mean" : "literal"; }

EntropyForm parse_entropy_form(const std::string& s) {
  if (s == "log1p_mean") return EntropyForm::log1p_mean;
  if (s == "literal") return EntropyForm::literal;
  throw ConfigError("[agent] entropy_form: unknown form '" + s + "' (expected log1p_mean | literal)");
}

namespace {

double squared_distance(const double* a, const double* b, Eigen::Index d) {
  double acc = 0.0;
  for (Eigen::Index c = 0; c < d; ++c) {
    const double diff = a[c] - b[c];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

std::vector<double> knn_distances(const Vector& query, const Matrix& set, std::size_t k,
                                  std::optional<Eigen::Index> exclude_row) {
  if (query.size() != set.cols()) throw ContractError("knn_distances: query width does not match the set");
  const std::size_t available = static_cast<std::size_t>(set.rows()) - (exclude_row ? 1 : 0);
  if (k == 0 || k > available) {
    throw ContractError("knn_distances: k=" + std::to_string(k) + " exceeds the " + std::to_string(available) +
                        " available points");
  }
  std::vector<double> sq;
  sq.reserve(static_cast<std::size_t>(set.rows()));
  for (Eigen::Index i = 0; i < set.rows(); ++i) {
    if (exclude_row && *exclude_row == i) continue;
    sq.push_back(squared_distance(query.data(), set.row(i).data(), set.cols()));
  }
  // Selection on squared distances; sqrt is monotone so the order holds.
  std::partial_sort(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(k), sq.end());
  sq.resize(k);
  for (auto& v : sq) v = std::sqrt(v);
  return sq;
}

double reduce_distances(const std::vector<double>& ascending, EntropyForm form) {
  const double k = static_cast<double>(ascending.size());
  double acc = 0.0;
  if (form == EntropyForm::log1p_mean) {
    for (double d : ascending) acc += d;
    return std::log1p(acc / k);
  }
  for (double d : ascending) acc += std::log(std::max(d, kLiteralDistanceFloor));
  return acc / k;
}

Vector particle_entropy_reward(const Matrix& embeddings, const Matrix& reference, std::size_t k, EntropyForm form,
                               bool reference_is_self) {
  if (reference_is_self && embeddings.rows() != reference.rows()) {
    throw ContractError("particle_entropy_reward: self reference must have the same rows as the embeddings");
  }
  Vector out(embeddings.rows());
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    const Vector q = embeddings.row(i).transpose();
    const auto d = knn_distances(q, reference, k, reference_is_self ? std::optional<Eigen::Index>(i) : std::nullopt);
    out[i] = reduce_distances(d, form);
  }
  return out;
}

Vector RewardNormalizer::normalize(const Vector& rewards) {
  if (rewards.size() == 0) return rewards;
  const double batch_mean = rewards.cwiseAbs().mean();
  if (!initialized_) {
    mean_ = batch_mean;
    initialized_ = true;
  } else {
    mean_ = decay_ * mean_ + (1.0 - decay_) * batch_mean;
  }
  return rewards / std::max(mean_, 1e-8);
}

}  // namespace cic::entropy
