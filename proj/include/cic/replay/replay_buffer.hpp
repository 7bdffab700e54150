#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cic/core/rng.hpp"
#include "cic/nn/mlp.hpp"

namespace cic::replay {

using nn::Matrix;
using nn::Vector;

struct ReplayRecord {
  Vector s;
  Vector a;
  double r_ext = 0.0;
  Vector s_next;
  Vector z;
  std::int64_t episode = 0;
  std::int64_t step = 0;
  // The episode ended by failure at this transition (zero bootstrap).
  bool failure = false;
};

struct Batch {
  Matrix s;
  Matrix a;
  Matrix s_n;
  Vector reward;
  Matrix z;
  // gamma^n, or zero when the window ends in a failure state.
  Vector discount;

  Eigen::Index size() const { return s.rows(); }
};

struct BufferShape {
  std::size_t obs_dim = 0;
  std::size_t action_dim = 0;
  std::size_t skill_dim = 0;
};

// n-step window starting at a record: the rewards it sums and where it ends.
struct Window {
  std::size_t length = 0;
  bool ends_in_failure = false;
};

// FIFO buffer over skill-tagged transitions. A window start is valid when
// the next n records belong to one episode with consecutive steps, or a
// failure record cuts the window short.
class ReplayBuffer {
 public:
  ReplayBuffer(BufferShape shape, std::size_t capacity, std::size_t nstep, double gamma);

  void push(ReplayRecord record);

  std::size_t size() const { return count_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t valid_windows() const { return valid_count_; }
  bool ready() const { return valid_count_ > 0; }
  std::size_t nstep() const { return nstep_; }
  double gamma() const { return gamma_; }
  const BufferShape& shape() const { return shape_; }

  // Oldest record has logical index 0.
  const ReplayRecord& at(std::size_t logical) const;
  bool is_valid_start(std::size_t logical) const;
  std::optional<Window> window_at(std::size_t logical) const;

  // Uniform over valid window starts, with replacement. Returns nullopt
  // ("not ready") when no full window exists yet.
  std::optional<Batch> sample_batch(Rng& rng, std::size_t batch_size) const;
  // Batch assembled from explicit window starts.
  Batch gather(const std::vector<std::size_t>& starts) const;

 private:
  std::size_t physical(std::size_t logical) const { return (head_ + logical) % capacity_; }
  void refresh_start(std::size_t logical);

  BufferShape shape_;
  std::size_t capacity_;
  std::size_t nstep_;
  double gamma_;
  std::vector<ReplayRecord> records_;
  std::vector<char> valid_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  std::size_t valid_count_ = 0;
};

}  // namespace cic::replay
