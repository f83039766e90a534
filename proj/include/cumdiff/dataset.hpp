#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cumdiff/kahan.hpp"

namespace cumdiff {

enum class Mode { calibration, subpopulation };

inline const char* mode_name(Mode mode) noexcept {
  return mode == Mode::calibration ? "calibration" : "subpopulation";
}

// One observation: covariate score, outcome response, sampling weight.
struct ScoredRecord {
  double score = 0.0;
  double response = 0.0;
  double weight = 1.0;

  friend bool operator==(const ScoredRecord&, const ScoredRecord&) = default;
};

// Records sorted ascending by score with equal scores adjacent and input
// order preserved inside each tie, plus the compensated total of the
// weights. Stability of the sort is what makes the within-tie baseline
// permutation reproducible from a seed alone.
struct ValidatedDataset {
  std::vector<ScoredRecord> records;
  Mode mode = Mode::calibration;
  double total_weight = 0.0;
};

namespace detail {

[[noreturn]] inline void record_error(std::size_t index, const std::string& what) {
  std::ostringstream msg;
  msg << "record " << (index + 1) << ": " << what;
  throw std::runtime_error(msg.str());
}

}  // namespace detail

// Validates every record, stable-sorts by score, and totals the weights.
// In calibration mode scores and responses must lie in [0, 1] (the
// Bernoulli null is only meaningful for probabilities); subpopulation mode
// accepts any finite responses.
inline ValidatedDataset validate_and_sort(std::vector<ScoredRecord> records, Mode mode) {
  if (records.empty()) {
    throw std::runtime_error("dataset is empty: at least one record is required");
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ScoredRecord& r = records[i];
    if (!std::isfinite(r.score)) detail::record_error(i, "non-finite score");
    if (!std::isfinite(r.response)) detail::record_error(i, "non-finite response");
    if (!(r.weight > 0.0) || !std::isfinite(r.weight)) {
      detail::record_error(i, "nonpositive weight (weights must be finite and > 0)");
    }
    if (mode == Mode::calibration) {
      if (r.score < 0.0 || r.score > 1.0) {
        detail::record_error(i, "score outside [0,1] in calibration mode");
      }
      if (r.response < 0.0 || r.response > 1.0) {
        detail::record_error(i, "response outside [0,1] in calibration mode");
      }
    }
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const ScoredRecord& a, const ScoredRecord& b) { return a.score < b.score; });
  KahanSum total;
  for (const ScoredRecord& r : records) total.add(r.weight);
  return ValidatedDataset{std::move(records), mode, total.value()};
}

}  // namespace cumdiff
