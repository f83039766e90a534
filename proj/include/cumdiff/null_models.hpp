#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cumdiff/aggregate.hpp"
#include "cumdiff/dataset.hpp"
#include "cumdiff/kahan.hpp"

namespace cumdiff {

// The regression value r(S_k) and null variance v(R_k) for each group.
// The variance already accounts for the group's weighted averaging via
// the concentration factor.
struct NullModel {
  Mode kind = Mode::calibration;
  std::vector<double> regression;
  std::vector<double> variance;
  std::vector<std::string> warnings;
};

// Full-population data used to estimate the regression function for
// subpopulation comparisons.
struct FullPopulationReference {
  ValidatedDataset data;
};

// Perfect-calibration null: r is the identity and each response is
// Bernoulli with mean equal to its score, so the group mean has variance
// S_k (1 - S_k) times the concentration factor.
inline NullModel calibration_null(const AggregatedDataset& agg) {
  NullModel model;
  model.kind = Mode::calibration;
  model.regression.reserve(agg.groups.size());
  model.variance.reserve(agg.groups.size());
  for (const TieGroup& g : agg.groups) {
    if (g.score < 0.0 || g.score > 1.0) {
      throw std::runtime_error("calibration null requires scores in [0,1]");
    }
    model.regression.push_back(g.score);
    model.variance.push_back(g.score * (1.0 - g.score) * g.concentration);
  }
  return model;
}

namespace detail {

inline std::string format_score(double s) {
  std::ostringstream msg;
  msg.precision(17);
  msg << s;
  return std::move(msg).str();
}

}  // namespace detail

// Null for "subpopulation matches the full population": partition the
// full-population records into cells by nearest subpopulation group score
// (records exactly at a midpoint go to the lower score), then use each
// cell's weighted response mean as r(S_k) and its weighted population
// variance, times the group's concentration factor, as v(R_k).
//
// A cell holding a single record yields variance 0; that is surfaced as a
// warning because a zero-variance null understates sigma.
inline NullModel subpopulation_null(const AggregatedDataset& agg,
                                    const FullPopulationReference& full) {
  const std::vector<TieGroup>& groups = agg.groups;
  const std::vector<ScoredRecord>& pop = full.data.records;
  if (groups.empty()) throw std::runtime_error("subpopulation has no groups");
  if (pop.empty()) throw std::runtime_error("full population is empty");

  // Both inputs are sorted, so cells are contiguous ranges found in one
  // merge pass over the population.
  const std::size_t n = groups.size();
  std::vector<IndexRange> cells(n);
  std::size_t cell = 0;
  cells[0].begin = 0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    while (cell + 1 < n) {
      const double midpoint = 0.5 * (groups[cell].score + groups[cell + 1].score);
      if (pop[i].score > midpoint) {
        cells[cell].end = i;
        ++cell;
        cells[cell].begin = i;
      } else {
        break;
      }
    }
  }
  cells[cell].end = pop.size();
  for (std::size_t k = cell + 1; k < n; ++k) cells[k] = IndexRange{pop.size(), pop.size()};

  NullModel model;
  model.kind = Mode::subpopulation;
  model.regression.reserve(n);
  model.variance.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const IndexRange range = cells[k];
    const std::size_t count = range.end - range.begin;
    if (count == 0) {
      throw std::runtime_error("no full-population records have score " +
                               detail::format_score(groups[k].score) +
                               " as their nearest subpopulation score");
    }
    double mean = 0.0;
    double variance = 0.0;
    if (count == 1) {
      mean = pop[range.begin].response;
      model.warnings.push_back("cell for score " + detail::format_score(groups[k].score) +
                               " contains a single full-population record; its variance "
                               "estimate is 0");
    } else {
      KahanSum w_sum, rw_sum;
      for (std::size_t i = range.begin; i < range.end; ++i) {
        w_sum.add(pop[i].weight);
        rw_sum.add(pop[i].response * pop[i].weight);
      }
      mean = rw_sum.value() / w_sum.value();
      KahanSum dev;
      for (std::size_t i = range.begin; i < range.end; ++i) {
        const double d = pop[i].response - mean;
        dev.add(pop[i].weight * d * d);
      }
      variance = dev.value() / w_sum.value();
    }
    model.regression.push_back(mean);
    model.variance.push_back(variance * groups[k].concentration);
  }
  return model;
}

}  // namespace cumdiff
