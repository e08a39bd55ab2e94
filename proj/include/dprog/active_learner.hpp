#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dprog/fpca.hpp"
#include "dprog/inference.hpp"
#include "dprog/prior.hpp"

namespace dprog {

/// Basis, prior and the training scores the prior was fitted on.
struct PrognosisModel {
  FpcaModel fpca;
  GaussianPrior prior;
  std::vector<ScoreVector> training_scores;
  std::vector<std::string> training_ids;
};

/// fit_fpca, project every curve, fit_gaussian_prior on the scores.
PrognosisModel build_prognosis_model(std::span<const DamageCurve> curves,
                                     const ComponentSelection& selection);

/// Refit on training_curves + new_curve.
PrognosisModel update_model(std::span<const DamageCurve> training_curves,
                            const DamageCurve& new_curve, const ComponentSelection& selection);

/// Error of every posterior draw at one observation count.
struct ErrorRecord {
  std::string structure_id;
  std::size_t M = 0;
  std::vector<double> per_draw_errors;
  double mean_error = 0.0;

  double median_error() const;
};

/// Mean of squared residuals over the M observed points.
double mse_error(std::span<const double> predicted, const PartialObservation& obs);

ErrorRecord error_record(const PosteriorSamples& samples, const FpcaModel& model,
                         const PartialObservation& obs);

enum class SelectionStatistic { Mean, Median };

struct AllocationDecision {
  std::string selected_structure_id;
  std::size_t decision_step = 0;
  SelectionStatistic statistic = SelectionStatistic::Mean;
  std::map<std::string, double> candidate_errors;
};

/// Structure with the largest error statistic; ties go to the smallest id.
AllocationDecision select_structure(std::span<const ErrorRecord> records,
                                    SelectionStatistic statistic = SelectionStatistic::Mean);

/// First M_star values from `interpolated`, the rest from the high-fidelity
/// curve. The result is tagged High with splice_index = M_star.
DamageCurve splice_curve(std::span<const double> interpolated, const DamageCurve& high_fidelity_tail,
                         std::size_t M_star);

/// CSV with header structure_id,M,draw_index,error.
void write_error_records(std::span<const ErrorRecord> records, const std::filesystem::path& path);

void write_decision(const AllocationDecision& decision, const std::filesystem::path& path);
AllocationDecision read_decision(const std::filesystem::path& path);

}  // namespace dprog
