#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cic/nn/mlp.hpp"

namespace cic::entropy {

using nn::Matrix;
using nn::Vector;

enum class EntropyForm {
  // log(1 + mean_j d_ij): finite on duplicate embeddings.
  log1p_mean,
  // mean_j log(max(d_ij, 1e-12)).
  literal,
};

std::string to_string(EntropyForm f);
EntropyForm parse_entropy_form(const std::string& s);

inline constexpr double kLiteralDistanceFloor = 1e-12;

// k smallest Euclidean distances from query to rows of set, ascending.
// When exclude_row is given, that row (the query itself) is skipped.
std::vector<double> knn_distances(const Vector& query, const Matrix& set, std::size_t k,
                                  std::optional<Eigen::Index> exclude_row = std::nullopt);

// Reward per row of embeddings against the reference set. When
// reference_is_self, row i is excluded from its own neighbour search.
Vector particle_entropy_reward(const Matrix& embeddings, const Matrix& reference, std::size_t k,
                               EntropyForm form, bool reference_is_self);

double reduce_distances(const std::vector<double>& ascending, EntropyForm form);

// Divides rewards by an exponential running mean of |reward|.
class RewardNormalizer {
 public:
  explicit RewardNormalizer(double decay = 0.99) : decay_(decay) {}

  // Updates the running mean with the batch, then scales the batch.
  Vector normalize(const Vector& rewards);

  double mean() const { return mean_; }
  bool initialized() const { return initialized_; }
  void restore(double mean, bool initialized) {
    mean_ = mean;
    initialized_ = initialized;
  }

 private:
  double decay_;
  double mean_ = 0.0;
  bool initialized_ = false;
};

}  // namespace cic::entropy
