#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dprog/fpca.hpp"
#include "dprog/inference.hpp"

namespace dprog {

/// Terminal-value statistics of the evaluation population.
struct PopulationStats {
  double y_max = 0.0;
  /// Sample standard deviation (N-1) of the true terminal values.
  double sigma_terminal = 0.0;
};

PopulationStats population_stats(std::span<const DamageCurve> truths);

/// 100 * y / (y_max * sigma^2) * (y_hat - y)^2
double weighted_terminal_error(double y_hat, double y, double y_max, double sigma_terminal);

struct TerminalErrorSet {
  std::string structure_id;
  std::size_t M = 0;
  std::string model_tag;
  std::vector<double> per_draw_weighted_errors;
  /// Same metric for the posterior-mean prediction.
  double point_estimate_error = 0.0;

  double mean() const;
  double median() const;
};

TerminalErrorSet terminal_error_set(const PosteriorSamples& samples, const FpcaModel& model,
                                    const DamageCurve& truth, const PopulationStats& stats,
                                    std::string model_tag, std::size_t M);

/// A finite sample with per-value weights summing to one.
struct WeightedSample {
  std::vector<double> values;
  std::vector<double> weights;

  double mean() const;
};

/// Equal-weight mixture of the candidate error sets: every set carries total
/// weight 1/n_sets, spread evenly over its draws.
WeightedSample random_baseline(std::span<const std::vector<double>> error_sets);

struct DensityGrid {
  std::vector<double> x;
  std::vector<double> density;
  double bandwidth = 0.0;
};

/// Gaussian kernel density with Silverman's rule-of-thumb bandwidth, on an
/// equidistant grid spanning the data +- 5 bandwidths. The grid is refined
/// beyond n_grid when needed to keep spacing below a quarter bandwidth.
/// Plotting only.
DensityGrid kernel_density(const WeightedSample& sample, std::size_t n_grid = 256);

WeightedSample unweighted(std::vector<double> values);

/// Rows for `model_tag,structure_id,M,draw,error`.
void append_error_rows(std::vector<std::vector<std::string>>& rows, const TerminalErrorSet& set);

}  // namespace dprog
