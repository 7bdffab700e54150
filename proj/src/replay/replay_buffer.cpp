#include "cic/replay/replay_buffer.hpp"

#include <cmath>

#include "cic/core/errors.hpp"

namespace cic::replay {

ReplayBuffer::ReplayBuffer(BufferShape shape, std::size_t capacity, std::size_t nstep, double gamma)
    : shape_(shape), capacity_(capacity), nstep_(nstep), gamma_(gamma) {
  if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
  if (nstep_ == 0) throw ConfigError("replay nstep must be positive");
  if (nstep_ > capacity_) throw ConfigError("replay nstep exceeds capacity");
  records_.resize(capacity_);
  valid_.assign(capacity_, 0);
}

const ReplayRecord& ReplayBuffer::at(std::size_t logical) const {
  if (logical >= count_) throw ContractError("replay index out of range");
  return records_[physical(logical)];
}

bool ReplayBuffer::is_valid_start(std::size_t logical) const {
  return logical < count_ && valid_[physical(logical)] != 0;
}

std::optional<Window> ReplayBuffer::window_at(std::size_t logical) const {
  if (logical >= count_) return std::nullopt;
  const ReplayRecord& first = records_[physical(logical)];
  for (std::size_t k = 0; k < nstep_; ++k) {
    if (logical + k >= count_) return std::nullopt;
    const ReplayRecord& r = records_[physical(logical + k)];
    if (r.episode != first.episode || r.step != first.step + static_cast<std::int64_t>(k)) return std::nullopt;
    if (r.failure) return Window{k + 1, true};
  }
  return Window{nstep_, false};
}

void ReplayBuffer::refresh_start(std::size_t logical) {
  const bool now = window_at(logical).has_value();
  char& flag = valid_[physical(logical)];
  if (now && !flag) ++valid_count_;
  if (!now && flag) --valid_count_;
  flag = now ? 1 : 0;
}

void ReplayBuffer::push(ReplayRecord record) {
  if (static_cast<std::size_t>(record.s.size()) != shape_.obs_dim ||
      static_cast<std::size_t>(record.s_next.size()) != shape_.obs_dim) {
    throw ContractError("replay push: observation width does not match obs_dim");
  }
  if (static_cast<std::size_t>(record.a.size()) != shape_.action_dim) {
    throw ContractError("replay push: action width does not match action_dim");
  }
  if (static_cast<std::size_t>(record.z.size()) != shape_.skill_dim) {
    throw ContractError("replay push: skill width does not match skill_dim");
  }
  if (count_ == capacity_) {
    if (valid_[head_]) --valid_count_;
    valid_[head_] = 0;
    head_ = (head_ + 1) % capacity_;
    --count_;
  }
  const std::size_t logical = count_;
  records_[physical(logical)] = std::move(record);
  valid_[physical(logical)] = 0;
  ++count_;

  // Windows whose fate is now determined: the one that just became full
  // and, after a failure, every window cut short by it.
  const std::size_t lo = logical + 1 >= nstep_ ? logical + 1 - nstep_ : 0;
  const std::size_t hi = records_[physical(logical)].failure ? logical : lo;
  for (std::size_t i = lo; i <= hi; ++i) refresh_start(i);
}

Batch ReplayBuffer::gather(const std::vector<std::size_t>& starts) const {
  const auto b = static_cast<Eigen::Index>(starts.size());
  Batch out;
  out.s.resize(b, static_cast<Eigen::Index>(shape_.obs_dim));
  out.a.resize(b, static_cast<Eigen::Index>(shape_.action_dim));
  out.s_n.resize(b, static_cast<Eigen::Index>(shape_.obs_dim));
  out.z.resize(b, static_cast<Eigen::Index>(shape_.skill_dim));
  out.reward.resize(b);
  out.discount.resize(b);
  for (Eigen::Index row = 0; row < b; ++row) {
    const std::size_t start = starts[static_cast<std::size_t>(row)];
    const auto w = window_at(start);
    if (!w) throw ContractError("replay gather: start is not a valid window");
    const ReplayRecord& first = at(start);
    double ret = 0.0;
    double g = 1.0;
    for (std::size_t k = 0; k < w->length; ++k) {
      ret += g * at(start + k).r_ext;
      g *= gamma_;
    }
    const ReplayRecord& last = at(start + w->length - 1);
    out.s.row(row) = first.s.transpose();
    out.a.row(row) = first.a.transpose();
    out.s_n.row(row) = last.s_next.transpose();
    if (shape_.skill_dim > 0) out.z.row(row) = first.z.transpose();
    out.reward[row] = ret;
    out.discount[row] = w->ends_in_failure ? 0.0 : g;
  }
  return out;
}

std::optional<Batch> ReplayBuffer::sample_batch(Rng& rng, std::size_t batch_size) const {
  if (valid_count_ == 0) return std::nullopt;
  std::vector<std::size_t> starts;
  starts.reserve(batch_size);
  while (starts.size() < batch_size) {
    const std::size_t i = rng.index(count_);
    if (valid_[physical(i)]) starts.push_back(i);
  }
  return gather(starts);
}

}  // namespace cic::replay
