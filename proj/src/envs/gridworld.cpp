#include "cic/envs/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cic/core/errors.hpp"

namespace cic::envs {

GridState gridworld_reset(const GridLayout& layout, std::uint64_t /*seed*/) {
  // The start cell is fixed by the layout; the seed is accepted for
  // interface symmetry with the pointmass.
  return GridState{layout.start_x, layout.start_y, 0};
}

GridState gridworld_transition(const GridLayout& layout, GridState s, Move move) {
  switch (move) {
    case Move::up:
      s.y = std::min(s.y + 1, layout.size - 1);
      break;
    case Move::down:
      s.y = std::max(s.y - 1, 0);
      break;
    case Move::left:
      s.x = std::max(s.x - 1, 0);
      break;
    case Move::right:
      s.x = std::min(s.x + 1, layout.size - 1);
      break;
  }
  s.step += 1;
  return s;
}

int cell_index(const GridLayout& layout, int x, int y) { return y * layout.size + x; }

Vector gridworld_onehot(const GridLayout& layout, const GridState& s) {
  Vector o = Vector::Zero(layout.size * layout.size);
  o[cell_index(layout, s.x, s.y)] = 1.0;
  return o;
}

Vector gridworld_coords(const GridLayout& layout, const GridState& s) {
  Vector o(2);
  o << static_cast<double>(s.x) / layout.size, static_cast<double>(s.y) / layout.size;
  return o;
}

Vector gridworld_observation(const GridLayout& layout, const GridState& s) {
  return layout.encoding == GridEncoding::onehot ? gridworld_onehot(layout, s) : gridworld_coords(layout, s);
}

StepResult gridworld_step(const EnvSpec& spec, GridState& s, Move move) {
  s = gridworld_transition(spec.grid, s, move);
  StepResult r;
  r.next_obs = gridworld_observation(spec.grid, s);
  r.extrinsic_reward = (s.x == spec.grid.size - 1 && s.y == spec.grid.size - 1) ? 1.0 : 0.0;
  r.step_index = s.step;
  r.terminated = s.step >= spec.episode_length;
  return r;
}

Move move_from_action(std::span<const double> action) {
  const double ax = action.size() > 0 && std::isfinite(action[0]) ? action[0] : 0.0;
  const double ay = action.size() > 1 && std::isfinite(action[1]) ? action[1] : 0.0;
  if (std::abs(ax) >= std::abs(ay)) return ax >= 0.0 ? Move::right : Move::left;
  return ay >= 0.0 ? Move::up : Move::down;
}

double coverage_of_cells(std::span<const int> cells, int num_cells) {
  if (cells.empty()) return 0.0;
  std::vector<char> seen(static_cast<std::size_t>(num_cells), 0);
  int distinct = 0;
  for (int c : cells) {
    if (c < 0 || c >= num_cells) throw ContractError("coverage: cell index out of range");
    if (!seen[static_cast<std::size_t>(c)]) {
      seen[static_cast<std::size_t>(c)] = 1;
      ++distinct;
    }
  }
  return static_cast<double>(distinct) / num_cells;
}

double coverage(std::span<const Vector> onehots, int num_cells) {
  std::vector<int> cells;
  cells.reserve(onehots.size());
  for (const auto& o : onehots) {
    if (o.size() != num_cells) throw ContractError("coverage: observation is not a one-hot of the grid size");
    int hot = -1;
    for (int i = 0; i < num_cells; ++i) {
      if (o[i] == 1.0) {
        if (hot >= 0) throw ContractError("coverage: observation has more than one hot entry");
        hot = i;
      } else if (o[i] != 0.0) {
        throw ContractError("coverage: observation is not one-hot");
      }
    }
    if (hot < 0) throw ContractError("coverage: observation has no hot entry");
    cells.push_back(hot);
  }
  return coverage_of_cells(cells, num_cells);
}

Gridworld::Gridworld(EnvSpec spec) : spec_(std::move(spec)) {}

Vector Gridworld::reset(Rng& /*rng*/) {
  state_ = gridworld_reset(spec_.grid, 0);
  return gridworld_observation(spec_.grid, state_);
}

StepResult Gridworld::step(std::span<const double> action) { return step_discrete(move_from_action(action)); }

StepResult Gridworld::step_discrete(Move move) { return gridworld_step(spec_, state_, move); }

}  // namespace cic::envs
