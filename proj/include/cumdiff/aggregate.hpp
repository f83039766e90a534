#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "cumdiff/dataset.hpp"
#include "cumdiff/kahan.hpp"

namespace cumdiff {

// One maximal run of equal scores collapsed to a single weighted record:
// summed weight, weighted-mean response, and the weight-concentration
// factor that rescales a per-response variance to the variance of the
// weighted mean.
struct TieGroup {
  double score = 0.0;
  double mean_response = 0.0;
  double group_weight = 0.0;
  double concentration = 1.0;  // (sum w^2) / (sum w)^2, in (0, 1]
  std::size_t multiplicity = 1;
};

// Half-open range of source-record indices, one per group.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Groups in strictly increasing score order. total_weight is the
// compensated sum of the group weights in that order; the abscissae
// computation reproduces the same accumulation so the final abscissa
// divides out to exactly 1.
struct AggregatedDataset {
  std::vector<TieGroup> groups;
  double total_weight = 0.0;
  std::vector<IndexRange> source_index_map;
};

// (sum w_j^2) / (sum w_j)^2 for strictly positive weights, evaluated as
// sum (w_j / W)^2 so skewed magnitudes cannot overflow, then clamped to
// the mathematical range [1/n, 1].
inline double concentration_factor(std::span<const double> weights) {
  if (weights.empty()) {
    throw std::runtime_error("concentration factor of an empty weight sequence");
  }
  KahanSum total;
  for (const double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::runtime_error("concentration factor requires finite positive weights");
    }
    total.add(w);
  }
  const double w_sum = total.value();
  KahanSum sq;
  for (const double w : weights) {
    const double q = w / w_sum;
    sq.add(q * q);
  }
  return std::clamp(sq.value(), 1.0 / static_cast<double>(weights.size()), 1.0);
}

// Collapses each run of equal scores into one TieGroup. A run of length
// one is copied verbatim (no arithmetic), so tie-free datasets aggregate
// bit-exactly to themselves.
inline AggregatedDataset aggregate_ties(const ValidatedDataset& dataset) {
  const std::vector<ScoredRecord>& recs = dataset.records;
  if (recs.empty()) {
    throw std::runtime_error("cannot aggregate an empty dataset");
  }
  AggregatedDataset out;
  KahanSum total;
  std::vector<double> run_weights;
  std::size_t i = 0;
  while (i < recs.size()) {
    std::size_t j = i + 1;
    while (j < recs.size() && recs[j].score == recs[i].score) ++j;

    TieGroup g;
    g.score = recs[i].score;
    g.multiplicity = j - i;
    if (g.multiplicity == 1) {
      g.mean_response = recs[i].response;
      g.group_weight = recs[i].weight;
      g.concentration = 1.0;
    } else {
      KahanSum w_sum, rw_sum;
      double lo = recs[i].response, hi = recs[i].response;
      run_weights.clear();
      for (std::size_t k = i; k < j; ++k) {
        w_sum.add(recs[k].weight);
        rw_sum.add(recs[k].response * recs[k].weight);
        lo = std::min(lo, recs[k].response);
        hi = std::max(hi, recs[k].response);
        run_weights.push_back(recs[k].weight);
      }
      g.group_weight = w_sum.value();
      g.mean_response = std::clamp(rw_sum.value() / g.group_weight, lo, hi);
      g.concentration = concentration_factor(run_weights);
    }
    total.add(g.group_weight);
    out.groups.push_back(g);
    out.source_index_map.push_back(IndexRange{i, j});
    i = j;
  }
  out.total_weight = total.value();
  return out;
}

}  // namespace cumdiff
