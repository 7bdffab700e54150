#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cic/envs/environment.hpp"

namespace cic::envs {

enum class Move { up = 0, down = 1, left = 2, right = 3 };
inline constexpr int kNumMoves = 4;

struct GridState {
  int x = 0;
  int y = 0;
  int step = 0;

  bool operator==(const GridState&) const = default;
};

GridState gridworld_reset(const GridLayout& layout, std::uint64_t seed);
// Pure in (cell, move): walls block, the step counter advances.
GridState gridworld_transition(const GridLayout& layout, GridState state, Move move);
StepResult gridworld_step(const EnvSpec& spec, GridState& state, Move move);

int cell_index(const GridLayout& layout, int x, int y);
Vector gridworld_onehot(const GridLayout& layout, const GridState& s);
Vector gridworld_coords(const GridLayout& layout, const GridState& s);
Vector gridworld_observation(const GridLayout& layout, const GridState& s);

// Continuous relaxation: the dominant axis of a 2-D action picks the move.
Move move_from_action(std::span<const double> action);

// Fraction of distinct cells among logged one-hot observations.
double coverage(std::span<const Vector> onehot_observations, int num_cells = 100);
double coverage_of_cells(std::span<const int> cells, int num_cells = 100);

class Gridworld final : public Environment {
 public:
  explicit Gridworld(EnvSpec spec);

  const EnvSpec& spec() const override { return spec_; }
  Vector reset(Rng& rng) override;
  StepResult step(std::span<const double> action) override;
  StepResult step_discrete(Move move);

  const GridState& state() const { return state_; }
  int cell() const { return cell_index(spec_.grid, state_.x, state_.y); }

 private:
  EnvSpec spec_;
  GridState state_;
};

}  // namespace cic::envs
