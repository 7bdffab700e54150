#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cic/trainer/probes.hpp"

namespace cic::io {

// One panel per skill value; every arrow is a single <line class="arrow">.
// The timestamp comment is omitted when no stamp is given.
std::string flow_svg(const std::vector<trainer::FlowPanel>& panels, const std::optional<std::string>& timestamp);

struct IntervalRow {
  std::string label;
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

std::string interval_svg(const std::vector<IntervalRow>& rows, const std::optional<std::string>& timestamp);

}  // namespace cic::io
