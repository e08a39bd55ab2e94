#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dprog/harness.hpp"

namespace dprog::criteria {

struct Outcome {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  /// False when the criterion needs more than one run to decide.
  bool evaluated = true;
};

nlohmann::ordered_json to_json(const Outcome& o);

/// K = 1 at the configured threshold with explained fraction >= 0.95.
Outcome variance_concentration(std::span<const DamageCurve> training, double threshold = 0.95);

/// Ranking of the first score equals the ranking of terminal values.
Outcome score_growth_ordering(std::span<const DamageCurve> training,
                              const ComponentSelection& selection);

/// Both outliers' mean errors exceed both inliers' mean errors.
bool outliers_exceed_inliers(const AllocationDecision& d, const std::vector<std::string>& outliers,
                             const std::vector<std::string>& inliers);

/// Median per-draw error at `late_M` is below the one at `early_M` for
/// every monitored structure.
bool errors_decay(const MonitorResult& r, std::size_t early_M, std::size_t late_M,
                  std::string* detail = nullptr);

/// Mean weighted terminal error of the variant updated with `candidate`
/// is below the pooled random-selection baseline, over M >= min_M.
bool informed_beats_baseline(const EvaluationResult& r, const std::string& candidate,
                             std::size_t min_M, std::string* detail = nullptr);

/// The `candidate`-updated prior's density at the largest score of its own
/// training set exceeds every other single-curve-updated prior's density there.
Outcome prior_shift(const EvaluationResult& r, const std::string& candidate);

/// update_model with a copy of each training curve: spectrum fractions
/// unchanged within 1e-8 and prior sigma not increased.
Outcome duplicate_update_stability(std::span<const DamageCurve> training,
                                   const ComponentSelection& selection);

}  // namespace dprog::criteria
