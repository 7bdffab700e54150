#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>

namespace cic {

// Counter-based generator: draw i of a stream is a pure function of
// (key, i). Child streams are derived from the key and a label, so a
// component's draws do not shift when unrelated components draw more.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept;

  Rng split(std::string_view label) const noexcept;
  Rng split(std::uint64_t index) const noexcept;

  std::uint64_t next_u64() noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  // Standard normal via Box-Muller; consumes two draws.
  double normal() noexcept;
  // Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n) noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next_u64(); }

 private:
  Rng(std::uint64_t key, std::uint64_t counter) noexcept : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_;
};

std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace cic
