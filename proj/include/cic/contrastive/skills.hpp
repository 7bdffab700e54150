#pragma once

#include <cstddef>

#include "cic/core/rng.hpp"
#include "cic/nn/mlp.hpp"

namespace cic::contrastive {

using nn::Vector;

// i.i.d. uniform entries on [0, 1].
Vector sample_skill(Rng& rng, std::size_t dim);

// z = v * 1.
Vector constant_skill(double v, std::size_t dim);

Vector one_hot_skill(std::size_t index, std::size_t k);

}  // namespace cic::contrastive
