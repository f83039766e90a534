#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "cumdiff/aggregate.hpp"
#include "cumdiff/dataset.hpp"
#include "cumdiff/kahan.hpp"
#include "cumdiff/null_models.hpp"
#include "cumdiff/rng.hpp"

namespace cumdiff {

// The cumulative-difference curve over the aggregated groups.
// abscissae/ordinates have n+1 entries (the origin plus one per group);
// sigma has n entries (the null standard deviation of each partial sum).
// Ordinates are stored raw; divide by sigma_n to normalize for plotting
// or statistics.
struct CumulativeCurve {
  std::vector<double> abscissae;
  std::vector<double> ordinates;
  std::vector<double> sigma;
  double sigma_n = 0.0;
};

// The per-record curve of the original data with each tie broken by a
// seeded within-group permutation. Has one point per original record plus
// the origin; group_boundary_indices[k] is the position whose ordinate
// closes group k.
struct BaselineCurve {
  std::vector<double> abscissae;
  std::vector<double> ordinates;
  std::vector<std::size_t> group_boundary_indices;
  std::uint64_t permutation_seed = 0;
};

// Weight-fraction abscissae: A_0 = 0 and A_l = (sum of the first l group
// weights) / (total weight). The running sum below repeats the exact
// accumulation that produced agg.total_weight, so the last abscissa is
// exactly 1.
inline std::vector<double> abscissae(const AggregatedDataset& agg) {
  std::vector<double> a;
  a.reserve(agg.groups.size() + 1);
  a.push_back(0.0);
  KahanSum cum;
  for (const TieGroup& g : agg.groups) {
    cum.add(g.group_weight);
    a.push_back(cum.value() / agg.total_weight);
  }
  return a;
}

namespace detail {

inline void check_null_size(const AggregatedDataset& agg, const NullModel& null) {
  if (null.regression.size() != agg.groups.size() || null.variance.size() != agg.groups.size()) {
    throw std::runtime_error("null model does not cover every group");
  }
}

}  // namespace detail

// C_0 = 0 and C_l = sum_{k<=l} (R_k - r(S_k)) W_k / (total weight), with a
// compensated running sum. sigma_l is the square root of the partial sums
// of v(R_k) (W_k / total)^2; those partial sums use plain addition of
// nonnegative terms, which keeps them monotone nondecreasing.
inline CumulativeCurve cumulative_differences(const AggregatedDataset& agg,
                                              const NullModel& null) {
  detail::check_null_size(agg, null);
  const std::size_t n = agg.groups.size();
  CumulativeCurve curve;
  curve.abscissae = abscissae(agg);
  curve.ordinates.reserve(n + 1);
  curve.ordinates.push_back(0.0);
  curve.sigma.reserve(n);

  KahanSum cum;
  double var = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const TieGroup& g = agg.groups[k];
    cum.add((g.mean_response - null.regression[k]) * g.group_weight / agg.total_weight);
    curve.ordinates.push_back(cum.value());
    const double q = g.group_weight / agg.total_weight;
    var += null.variance[k] * (q * q);
    curve.sigma.push_back(std::sqrt(var));
  }
  curve.sigma_n = curve.sigma.back();
  if (!(curve.sigma_n > 0.0)) {
    throw std::runtime_error("degenerate null: zero variance");
  }
  return curve;
}

// The randomized-tiebreak curve over the original records. Within each
// group the records are visited in a seeded Fisher-Yates order; ordinates
// are the per-record compensated running sums of (response - r(S_k)) *
// weight / (total weight). For a tie-free dataset every group is a single
// record, the permutation is the identity, and the accumulation repeats
// cumulative_differences step for step.
inline BaselineCurve baseline_curve(const ValidatedDataset& dataset, const AggregatedDataset& agg,
                                    const NullModel& null, std::uint64_t seed) {
  detail::check_null_size(agg, null);
  if (agg.source_index_map.size() != agg.groups.size() ||
      (!agg.source_index_map.empty() && agg.source_index_map.back().end != dataset.records.size())) {
    throw std::runtime_error("aggregation does not match the dataset");
  }

  BaselineCurve curve;
  const std::size_t n_records = dataset.records.size();
  curve.abscissae.reserve(n_records + 1);
  curve.ordinates.reserve(n_records + 1);
  curve.abscissae.push_back(0.0);
  curve.ordinates.push_back(0.0);
  curve.group_boundary_indices.reserve(agg.groups.size());
  curve.permutation_seed = seed;

  SplitMix64 rng(seed);
  std::vector<std::size_t> order;
  KahanSum cum, wcum;
  for (std::size_t k = 0; k < agg.groups.size(); ++k) {
    const IndexRange range = agg.source_index_map[k];
    order.resize(range.end - range.begin);
    std::iota(order.begin(), order.end(), range.begin);
    if (order.size() > 1) {
      seeded_shuffle(std::span<std::size_t>(order), rng);
    }
    for (const std::size_t idx : order) {
      const ScoredRecord& rec = dataset.records[idx];
      cum.add((rec.response - null.regression[k]) * rec.weight / agg.total_weight);
      wcum.add(rec.weight);
      curve.ordinates.push_back(cum.value());
      curve.abscissae.push_back(wcum.value() / agg.total_weight);
    }
    curve.group_boundary_indices.push_back(curve.ordinates.size() - 1);
  }
  return curve;
}

// Largest |B_l - C_l| over the shared points l = 0..n (the origin and the
// group boundaries). Throws if the curves cannot have come from the same
// dataset.
inline double equivalence_report(const CumulativeCurve& curve_c, const BaselineCurve& curve_b) {
  const std::size_t n = curve_b.group_boundary_indices.size();
  if (curve_c.ordinates.size() != n + 1 || curve_c.abscissae.size() != n + 1) {
    throw std::runtime_error("curve length mismatch: the curves describe different datasets");
  }
  double max_abs = 0.0;
  for (std::size_t l = 1; l <= n; ++l) {
    const std::size_t bi = curve_b.group_boundary_indices[l - 1];
    if (bi >= curve_b.ordinates.size()) {
      throw std::runtime_error("baseline boundary index out of range");
    }
    if (std::fabs(curve_b.abscissae[bi] - curve_c.abscissae[l]) > 1e-9) {
      throw std::runtime_error("curve abscissae mismatch: the curves describe different datasets");
    }
    max_abs = std::max(max_abs, std::fabs(curve_b.ordinates[bi] - curve_c.ordinates[l]));
  }
  return max_abs;
}

}  // namespace cumdiff
