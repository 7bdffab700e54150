#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cic/core/rng.hpp"

namespace cic::stats {

// raw / expert; expert must be positive.
double normalize(double raw, double expert);
// Mean after dropping floor(n/4) scores from each end; needs n >= 4.
double iqm(std::span<const double> scores);
// mean of max(0, 1 - s).
double optimality_gap(std::span<const double> scores);
double median(std::span<const double> scores);
double mean(std::span<const double> scores);

using Statistic = std::function<double(std::span<const double>)>;

struct ScoreEntry {
  std::string task;
  std::uint64_t seed = 0;
  double score = 0.0;
};

struct ScoreTable {
  std::vector<ScoreEntry> entries;
  std::map<std::string, double> expert;

  // (task, seed) pairs must be unique and every task needs an expert > 0.
  void validate() const;
  // Normalized scores grouped per task, tasks in name order.
  std::vector<std::vector<double>> normalized_by_task() const;
};

// Source of resampling indices. `position` is the draw number inside the
// current stratum.
class IndexSampler {
 public:
  virtual ~IndexSampler() = default;
  virtual std::size_t draw(std::size_t n, std::size_t position) = 0;
};

class RngSampler final : public IndexSampler {
 public:
  explicit RngSampler(Rng rng) : rng_(rng) {}
  std::size_t draw(std::size_t n, std::size_t /*position*/) override { return rng_.index(n); }

 private:
  Rng rng_;
};

// Returns the identity resample.
class CopyingSampler final : public IndexSampler {
 public:
  std::size_t draw(std::size_t n, std::size_t position) override { return position % n; }
};

struct Interval {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Resamples runs with replacement inside each stratum, pools them and
// recomputes the statistic; percentile interval at `level`.
Interval stratified_bootstrap_ci(const std::vector<std::vector<double>>& strata, const Statistic& statistic,
                                 std::size_t resamples, double level, IndexSampler& sampler);
Interval stratified_bootstrap_ci(const ScoreTable& table, const Statistic& statistic, std::size_t resamples,
                                 double level, Rng rng);

// Order-statistic percentile bounds of a bootstrap distribution.
Interval percentile_interval(std::vector<double> values, double level);

}  // namespace cic::stats
