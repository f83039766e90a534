#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cumdiff/dataset.hpp"
#include "cumdiff/rng.hpp"

namespace cumdiff {

enum class ResponseKind { bernoulli, uniform };

// Shape of a synthetic calibration dataset: n_groups distinct scores in
// (0, 1), per-score multiplicities in [1, max_multiplicity], weights
// log-uniform on [weight_min, weight_max].
struct SyntheticSpec {
  std::size_t n_groups = 100;
  std::size_t max_multiplicity = 5;
  double weight_min = 0.1;
  double weight_max = 10.0;
  ResponseKind responses = ResponseKind::bernoulli;
};

namespace detail {

inline double log_uniform(SplitMix64& rng, double lo, double hi) {
  return std::exp(std::log(lo) + rng.next_unit() * (std::log(hi) - std::log(lo)));
}

}  // namespace detail

// Deterministically generates a sorted calibration-mode dataset with ties.
// Bernoulli responses make the dataset perfectly calibrated in
// distribution; uniform responses are deliberately miscalibrated.
inline ValidatedDataset make_synthetic_dataset(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.n_groups == 0) throw std::runtime_error("need at least one group");
  if (spec.max_multiplicity == 0) throw std::runtime_error("need multiplicity >= 1");
  if (!(spec.weight_min > 0.0) || !(spec.weight_max >= spec.weight_min)) {
    throw std::runtime_error("weight range must satisfy 0 < min <= max");
  }
  SplitMix64 rng(seed);

  std::vector<double> scores;
  scores.reserve(spec.n_groups);
  while (scores.size() < spec.n_groups) {
    scores.push_back(rng.next_unit());
    if (scores.size() == spec.n_groups) {
      std::sort(scores.begin(), scores.end());
      const auto dup = std::unique(scores.begin(), scores.end());
      scores.erase(dup, scores.end());
    }
  }

  std::vector<ScoredRecord> records;
  for (const double score : scores) {
    const std::size_t multiplicity = 1 + static_cast<std::size_t>(
        rng.next_below(static_cast<std::uint64_t>(spec.max_multiplicity)));
    for (std::size_t j = 0; j < multiplicity; ++j) {
      ScoredRecord rec;
      rec.score = score;
      rec.weight = detail::log_uniform(rng, spec.weight_min, spec.weight_max);
      rec.response = (spec.responses == ResponseKind::bernoulli)
                         ? ((rng.next_unit() <= score) ? 1.0 : 0.0)
                         : rng.next_unit();
      records.push_back(rec);
    }
  }
  return validate_and_sort(std::move(records), Mode::calibration);
}

// Redraws every response as Bernoulli(score) in place, preserving scores,
// weights, and order. Used for null-hypothesis replication experiments.
inline void resample_bernoulli_responses(ValidatedDataset& dataset, SplitMix64& rng) {
  for (ScoredRecord& rec : dataset.records) {
    rec.response = (rng.next_unit() <= rec.score) ? 1.0 : 0.0;
  }
}

}  // namespace cumdiff
