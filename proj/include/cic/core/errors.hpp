#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cic {

// Invalid or unresolvable configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated an operation's precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Non-finite values during optimization (CLI exit code 3).
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::int64_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

// Broken internal invariant, e.g. a stale forward cache.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Persisted data failed validation (CLI exit code 4).
class CorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cic
