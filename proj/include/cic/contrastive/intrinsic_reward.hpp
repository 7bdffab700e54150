#pragma once

#include <cstddef>
#include <string>

#include "cic/contrastive/contrastive.hpp"
#include "cic/entropy/particle_entropy.hpp"

namespace cic::contrastive {

enum class RewardVariant { entropy, discriminator, similarity, uncertainty };

std::string to_string(RewardVariant v);
RewardVariant parse_reward_variant(const std::string& s);

struct EntropySettings {
  std::size_t k = 12;
  entropy::EntropyForm form = entropy::EntropyForm::log1p_mean;
};

// Particle entropy of g_psi1(tau) against the rest of the batch.
Vector entropy_reward(const Matrix& tau, const CicNets& nets, const EntropySettings& settings);

// Per-row cosine between key and query embeddings.
Vector row_cosine(const Matrix& a, const Matrix& b);

// Population standard deviation across members for each row; exact zero
// when every member agrees.
Vector member_stddev(const std::vector<Vector>& members);

// Entropy reward plus the variant's extra term (zero for entropy).
// Returned before normalization.
Vector intrinsic_reward(RewardVariant variant, const Matrix& tau, const Matrix& z, const CicNets& nets,
                        const EntropySettings& settings);

}  // namespace cic::contrastive
