#include "cic/contrastive/intrinsic_reward.hpp"

#include <cmath>

#include "cic/core/errors.hpp"

namespace cic::contrastive {

std::string to_string(RewardVariant v) {
  switch (v) {
    case RewardVariant::entropy:
      return "entropy";
    case RewardVariant::discriminator:
      return "discriminator";
    case RewardVariant::similarity:
      return "similarity";
    case RewardVariant::uncertainty:
      return "uncertainty";
  }
  return "entropy";
}

RewardVariant parse_reward_variant(const std::string& s) {
  if (s == "entropy") return RewardVariant::entropy;
  if (s == "discriminator") return RewardVariant::discriminator;
  if (s == "similarity") return RewardVariant::similarity;
  if (s == "uncertainty") return RewardVariant::uncertainty;
  throw ConfigError("[agent] variant: unknown reward variant '" + s +
                    "' (expected entropy | discriminator | similarity | uncertainty)");
}

Vector entropy_reward(const Matrix& tau, const CicNets& nets, const EntropySettings& settings) {
  const Matrix h = nets.keys(tau);
  return entropy::particle_entropy_reward(h, h, settings.k, settings.form, true);
}

Vector row_cosine(const Matrix& a, const Matrix& b) {
  const Matrix an = normalize_rows(a);
  const Matrix bn = normalize_rows(b);
  return an.cwiseProduct(bn).rowwise().sum();
}

Vector member_stddev(const std::vector<Vector>& members) {
  if (members.size() < 2) throw ContractError("member_stddev: needs at least two members");
  const Vector& ref = members.front();
  Vector mean = Vector::Zero(ref.size());
  Vector sq = Vector::Zero(ref.size());
  for (const auto& m : members) {
    const Vector d = m - ref;
    mean += d;
    sq += d.cwiseProduct(d);
  }
  const double k = static_cast<double>(members.size());
  mean /= k;
  return (sq / k - mean.cwiseProduct(mean)).cwiseMax(0.0).cwiseSqrt();
}

Vector intrinsic_reward(RewardVariant variant, const Matrix& tau, const Matrix& z, const CicNets& nets,
                        const EntropySettings& settings) {
  Vector r = entropy_reward(tau, nets, settings);
  switch (variant) {
    case RewardVariant::entropy:
      break;
    case RewardVariant::discriminator:
      r += discriminator_scores(similarity_matrix(tau, z, nets));
      break;
    case RewardVariant::similarity:
      r += row_cosine(nets.keys(tau), nets.queries(z));
      break;
    case RewardVariant::uncertainty: {
      if (nets.ensemble.empty()) throw ConfigError("uncertainty reward needs an ensemble of at least 2 skill encoders");
      const Matrix keys = nets.keys(tau);
      std::vector<Vector> sims;
      sims.push_back(row_cosine(keys, nets.queries(z)));
      for (const auto& member : nets.ensemble) sims.push_back(row_cosine(keys, nets.queries_with(member, z)));
      r += member_stddev(sims);
      break;
    }
  }
  return r;
}

}  // namespace cic::contrastive
