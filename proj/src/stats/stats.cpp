#include "cic/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cic/core/errors.hpp"

namespace cic::stats {

double normalize(double raw, double expert) {
  if (!(expert > 0.0)) throw ContractError("expert reference score must be positive");
  return raw / expert;
}

double mean(std::span<const double> scores) {
  if (scores.empty()) throw ContractError("mean of an empty score set");
  double s = 0.0;
  for (double x : scores) s += x;
  return s / static_cast<double>(scores.size());
}

double median(std::span<const double> scores) {
  if (scores.empty()) throw ContractError("median of an empty score set");
  std::vector<double> v(scores.begin(), scores.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double iqm(std::span<const double> scores) {
  if (scores.size() < 4) throw ContractError("iqm needs at least 4 scores");
  std::vector<double> v(scores.begin(), scores.end());
  std::sort(v.begin(), v.end());
  const std::size_t cut = v.size() / 4;
  return mean(std::span<const double>(v.data() + cut, v.size() - 2 * cut));
}

double optimality_gap(std::span<const double> scores) {
  if (scores.empty()) throw ContractError("optimality gap of an empty score set");
  double s = 0.0;
  for (double x : scores) s += std::max(0.0, 1.0 - x);
  return s / static_cast<double>(scores.size());
}

void ScoreTable::validate() const {
  std::set<std::pair<std::string, std::uint64_t>> seen;
  for (const auto& e : entries) {
    if (!seen.insert({e.task, e.seed}).second) {
      throw ContractError("duplicate score for task '" + e.task + "' seed " + std::to_string(e.seed));
    }
    const auto it = expert.find(e.task);
    if (it == expert.end()) throw ContractError("no expert reference for task '" + e.task + "'");
    if (!(it->second > 0.0)) throw ContractError("expert reference for task '" + e.task + "' must be positive");
  }
}

std::vector<std::vector<double>> ScoreTable::normalized_by_task() const {
  validate();
  std::map<std::string, std::vector<double>> groups;
  for (const auto& e : entries) groups[e.task].push_back(normalize(e.score, expert.at(e.task)));
  std::vector<std::vector<double>> out;
  for (auto& [task, scores] : groups) out.push_back(std::move(scores));
  return out;
}

Interval percentile_interval(std::vector<double> values, double level) {
  if (values.empty()) throw ContractError("percentile interval of an empty distribution");
  if (!(level > 0.0 && level < 1.0)) throw ContractError("interval level must lie in (0, 1)");
  std::sort(values.begin(), values.end());
  const double alpha = 1.0 - level;
  const double last = static_cast<double>(values.size() - 1);
  // The slack absorbs rounding in 1 - level, e.g. 1 - 0.9 < 0.1.
  constexpr double kSlack = 1e-9;
  const auto lo = static_cast<std::size_t>(std::floor(0.5 * alpha * last + kSlack));
  const auto hi = static_cast<std::size_t>(std::ceil((1.0 - 0.5 * alpha) * last - kSlack));
  return {0.0, values[lo], values[std::min(hi, values.size() - 1)]};
}

Interval stratified_bootstrap_ci(const std::vector<std::vector<double>>& strata, const Statistic& statistic,
                                 std::size_t resamples, double level, IndexSampler& sampler) {
  if (strata.empty()) throw ContractError("bootstrap needs at least one task");
  if (resamples == 0) throw ContractError("bootstrap needs at least one resample");
  std::vector<double> pooled;
  for (const auto& s : strata) {
    if (s.size() < 2) throw ContractError("bootstrap needs at least 2 seeds per task");
    pooled.insert(pooled.end(), s.begin(), s.end());
  }
  const double point = statistic(pooled);
  std::vector<double> dist;
  dist.reserve(resamples);
  std::vector<double> sample(pooled.size());
  for (std::size_t r = 0; r < resamples; ++r) {
    std::size_t o = 0;
    for (const auto& s : strata) {
      for (std::size_t i = 0; i < s.size(); ++i) sample[o++] = s[sampler.draw(s.size(), i)];
    }
    dist.push_back(statistic(sample));
  }
  Interval out = percentile_interval(std::move(dist), level);
  out.point = point;
  return out;
}

Interval stratified_bootstrap_ci(const ScoreTable& table, const Statistic& statistic, std::size_t resamples,
                                 double level, Rng rng) {
  RngSampler sampler(rng);
  return stratified_bootstrap_ci(table.normalized_by_task(), statistic, resamples, level, sampler);
}

}  // namespace cic::stats
