#pragma once

#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dprog/fpca.hpp"

namespace dprog {

/// Independent per-component Gaussian belief over principal-component scores.
struct GaussianPrior {
  std::vector<double> mu;
  std::vector<double> sigma;
  /// Set when any sigma was raised to the floor 1e-6 * max(|mu|, 1).
  bool degenerate = false;

  std::size_t size() const { return mu.size(); }
};

/// mu = sample mean, sigma = sample standard deviation (N-1), floored.
GaussianPrior fit_gaussian_prior(std::span<const ScoreVector> scores);

double log_prior_density(const GaussianPrior& prior, std::span<const double> beta);

void to_json(nlohmann::json& j, const GaussianPrior& p);
void from_json(const nlohmann::json& j, GaussianPrior& p);

}  // namespace dprog
