#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "cumdiff/aggregate.hpp"
#include "cumdiff/curve.hpp"
#include "cumdiff/dataset.hpp"
#include "cumdiff/null_models.hpp"
#include "cumdiff/rng.hpp"

namespace cumdiff {

enum class StatKind { max_abs, range };

struct ScalarStats {
  double max_abs = 0.0;  // max_l |C_l| / sigma_n
  double range = 0.0;    // (max_l C_l - min_l C_l) / sigma_n
};

// Scalar summaries of the curve, normalized by sigma_n. Both include the
// origin, so a monotone nonnegative curve has range == max_abs.
inline ScalarStats scalar_statistics(const CumulativeCurve& curve) {
  if (!(curve.sigma_n > 0.0)) {
    throw std::runtime_error("scalar statistics require sigma_n > 0");
  }
  double hi = 0.0, lo = 0.0;
  for (const double c : curve.ordinates) {
    hi = std::max(hi, c);
    lo = std::min(lo, c);
  }
  return ScalarStats{std::max(hi, -lo) / curve.sigma_n, (hi - lo) / curve.sigma_n};
}

// P(sup_{[0,1]} |B| >= x) for a standard Brownian motion B, via the
// reflection-principle series
//
//   1 - (4/pi) sum_{j>=0} ((-1)^j / (2j+1)) exp(-pi^2 (2j+1)^2 / (8 x^2)),
//
// summed until a term falls below 1e-16 and clamped to [0,1] (the
// subtraction cancels to roundoff once the true value is below ~1e-15).
inline double pvalue_max_abs_asymptotic(double x) {
  if (std::isnan(x) || x < 0.0) {
    throw std::runtime_error("statistic must be a nonnegative real number");
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x) || x > 40.0) return 0.0;  // below double roundoff
  static constexpr double kPi = 3.14159265358979323846;
  const double c = kPi * kPi / (8.0 * x * x);
  double sum = 0.0;
  double sign = 1.0;
  for (unsigned j = 0;; ++j, sign = -sign) {
    const double odd = 2.0 * j + 1.0;
    const double term = std::exp(-c * odd * odd) / odd;
    sum += sign * term;
    if (term < 1e-16) break;
  }
  return std::clamp(1.0 - (4.0 / kPi) * sum, 0.0, 1.0);
}

namespace detail {

// Per-group standard deviations of the simulated curve increments,
// sqrt(v(R_k)) * W_k / total, plus the resulting sigma_n.
struct IncrementScale {
  std::vector<double> sd;
  double sigma_n = 0.0;
};

inline IncrementScale increment_scale(const AggregatedDataset& agg, const NullModel& null) {
  check_null_size(agg, null);
  IncrementScale scale;
  scale.sd.reserve(agg.groups.size());
  double var = 0.0;
  for (std::size_t k = 0; k < agg.groups.size(); ++k) {
    const double q = agg.groups[k].group_weight / agg.total_weight;
    scale.sd.push_back(std::sqrt(null.variance[k]) * q);
    var += null.variance[k] * (q * q);
  }
  scale.sigma_n = std::sqrt(var);
  if (!(scale.sigma_n > 0.0)) {
    throw std::runtime_error("degenerate null: zero variance");
  }
  return scale;
}

// Runs fn(first, last) over [0, trials) split into contiguous chunks,
// possibly on several threads. Each trial derives its own stream from
// (seed, trial index), so the partition cannot change any result.
template <typename Fn>
void for_each_trial_chunk(std::size_t trials, std::size_t work_per_trial, Fn fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t min_parallel_work = std::size_t{1} << 22;
  unsigned n_threads = 1;
  if (hw > 1 && trials * work_per_trial >= min_parallel_work) {
    n_threads = static_cast<unsigned>(std::min<std::size_t>(hw, trials));
  }
  if (n_threads == 1) {
    fn(std::size_t{0}, trials);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  const std::size_t chunk = (trials + n_threads - 1) / n_threads;
  for (unsigned t = 0; t < n_threads; ++t) {
    const std::size_t first = std::min(trials, t * chunk);
    const std::size_t last = std::min(trials, first + chunk);
    if (first == last) break;
    workers.emplace_back(fn, first, last);
  }
  for (std::thread& w : workers) w.join();
}

// Counts simulated Gaussian-increment curves whose statistics reach the
// observed values (one simulation stream serves both statistics).
inline std::pair<std::uint64_t, std::uint64_t> mc_exceed_counts(
    const AggregatedDataset& agg, const NullModel& null, std::size_t trials, std::uint64_t seed,
    double observed_max_abs, double observed_range) {
  const IncrementScale scale = increment_scale(agg, null);
  const std::size_t n = scale.sd.size();
  std::atomic<std::uint64_t> count_max{0}, count_range{0};
  for_each_trial_chunk(trials, n, [&](std::size_t first, std::size_t last) {
    std::uint64_t local_max = 0, local_range = 0;
    for (std::size_t t = first; t < last; ++t) {
      SplitMix64 rng(derive_stream(seed, t));
      double sum = 0.0, hi = 0.0, lo = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        sum += scale.sd[k] * rng.next_normal();
        hi = std::max(hi, sum);
        lo = std::min(lo, sum);
      }
      const double stat_max = std::max(hi, -lo) / scale.sigma_n;
      const double stat_range = (hi - lo) / scale.sigma_n;
      if (stat_max >= observed_max_abs) ++local_max;
      if (stat_range >= observed_range) ++local_range;
    }
    count_max += local_max;
    count_range += local_range;
  });
  return {count_max.load(), count_range.load()};
}

inline double add_one_pvalue(std::uint64_t hits, std::size_t trials) {
  return (1.0 + static_cast<double>(hits)) / (static_cast<double>(trials) + 1.0);
}

}  // namespace detail

// Monte Carlo P-value under the Gaussian-increment null: each trial draws
// independent group increments with mean 0 and variance v(R_k) (W_k /
// total)^2, evaluates the chosen statistic, and counts trials reaching the
// observed value. Uses the add-one estimator (1 + hits) / (trials + 1),
// which can never return exactly 0. Trial t consumes the substream
// derive_stream(seed, t) only, so results do not depend on threading.
inline double pvalue_monte_carlo(StatKind kind, double observed, const AggregatedDataset& agg,
                                 const NullModel& null, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) {
    throw std::runtime_error("at least one Monte Carlo trial is required");
  }
  if (std::isnan(observed)) {
    throw std::runtime_error("observed statistic is NaN");
  }
  const auto [hits_max, hits_range] =
      detail::mc_exceed_counts(agg, null, trials, seed, observed, observed);
  return detail::add_one_pvalue(kind == StatKind::max_abs ? hits_max : hits_range, trials);
}

// Monte Carlo P-value that resimulates the exact calibration null: every
// original record's response is redrawn as Bernoulli(score) and the curve
// is re-aggregated. Slower than the Gaussian oracle and only defined for
// calibration mode; used to validate the Gaussian approximation.
inline double pvalue_monte_carlo_bernoulli(StatKind kind, double observed,
                                           const ValidatedDataset& dataset,
                                           const AggregatedDataset& agg, const NullModel& null,
                                           std::size_t trials, std::uint64_t seed) {
  if (trials == 0) {
    throw std::runtime_error("at least one Monte Carlo trial is required");
  }
  if (std::isnan(observed)) {
    throw std::runtime_error("observed statistic is NaN");
  }
  if (null.kind != Mode::calibration) {
    throw std::runtime_error("Bernoulli resimulation requires the calibration null");
  }
  const detail::IncrementScale scale = detail::increment_scale(agg, null);
  const std::size_t n = agg.groups.size();

  std::atomic<std::uint64_t> count{0};
  detail::for_each_trial_chunk(trials, dataset.records.size(), [&](std::size_t first,
                                                                   std::size_t last) {
    std::uint64_t local = 0;
    for (std::size_t t = first; t < last; ++t) {
      SplitMix64 rng(derive_stream(seed, t));
      double sum = 0.0, hi = 0.0, lo = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const IndexRange range = agg.source_index_map[k];
        const double score = agg.groups[k].score;
        double numer = 0.0;
        for (std::size_t i = range.begin; i < range.end; ++i) {
          const double r = (rng.next_unit() <= score) ? 1.0 : 0.0;
          numer += (r - score) * dataset.records[i].weight;
        }
        sum += numer / agg.total_weight;
        hi = std::max(hi, sum);
        lo = std::min(lo, sum);
      }
      const double stat = (kind == StatKind::max_abs ? std::max(hi, -lo) : hi - lo) / scale.sigma_n;
      if (stat >= observed) ++local;
    }
    count += local;
  });
  return detail::add_one_pvalue(count.load(), trials);
}

// Scalar statistics plus their P-values. mc_trials and mc_seed record the
// Monte Carlo configuration the P-values were computed with.
struct SummaryReport {
  double max_abs_stat = 0.0;
  double range_stat = 0.0;
  double p_max_abs_asymptotic = 1.0;
  double p_max_abs_mc = 1.0;
  double p_range_mc = 1.0;
  std::size_t mc_trials = 0;
  std::uint64_t mc_seed = 0;
};

// Evaluates both statistics and all P-values in one pass. The Monte Carlo
// P-values reuse one simulation stream, so they equal what the two
// corresponding pvalue_monte_carlo calls with the same seed would return.
inline SummaryReport summarize(const CumulativeCurve& curve, const AggregatedDataset& agg,
                               const NullModel& null, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) {
    throw std::runtime_error("at least one Monte Carlo trial is required");
  }
  const ScalarStats stats = scalar_statistics(curve);
  const auto [hits_max, hits_range] =
      detail::mc_exceed_counts(agg, null, trials, seed, stats.max_abs, stats.range);
  SummaryReport report;
  report.max_abs_stat = stats.max_abs;
  report.range_stat = stats.range;
  report.p_max_abs_asymptotic = pvalue_max_abs_asymptotic(stats.max_abs);
  report.p_max_abs_mc = detail::add_one_pvalue(hits_max, trials);
  report.p_range_mc = detail::add_one_pvalue(hits_range, trials);
  report.mc_trials = trials;
  report.mc_seed = seed;
  return report;
}

}  // namespace cumdiff
