#include "dprog/prior.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "dprog/error.hpp"

namespace dprog {

GaussianPrior fit_gaussian_prior(std::span<const ScoreVector> scores) {
  require(scores.size() >= 2, ErrorKind::InvalidArgument,
          "fit_gaussian_prior needs at least 2 score vectors");
  const std::size_t K = scores.front().size();
  require(K >= 1, ErrorKind::InvalidArgument, "empty score vector");
  for (const auto& s : scores)
    require(s.size() == K, ErrorKind::DimensionMismatch, "score vectors differ in length");

  const double N = static_cast<double>(scores.size());
  GaussianPrior p;
  p.mu.assign(K, 0.0);
  p.sigma.assign(K, 0.0);
  for (const auto& s : scores)
    for (std::size_t k = 0; k < K; ++k) p.mu[k] += s[k];
  for (double& m : p.mu) m /= N;
  for (const auto& s : scores)
    for (std::size_t k = 0; k < K; ++k) p.sigma[k] += (s[k] - p.mu[k]) * (s[k] - p.mu[k]);
  for (std::size_t k = 0; k < K; ++k) {
    p.sigma[k] = std::sqrt(p.sigma[k] / (N - 1.0));
    const double floor = 1e-6 * std::max(std::abs(p.mu[k]), 1.0);
    if (!(p.sigma[k] >= floor)) {
      p.sigma[k] = floor;
      p.degenerate = true;
    }
  }
  return p;
}

double log_prior_density(const GaussianPrior& prior, std::span<const double> beta) {
  require(beta.size() == prior.size(), ErrorKind::DimensionMismatch,
          "log_prior_density: expected " + std::to_string(prior.size()) + " scores, got " +
              std::to_string(beta.size()));
  constexpr double half_log_2pi = 0.91893853320467274178;  // 0.5 * log(2 pi)
  double lp = 0.0;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    const double z = (beta[k] - prior.mu[k]) / prior.sigma[k];
    lp += -0.5 * z * z - std::log(prior.sigma[k]) - half_log_2pi;
  }
  return lp;
}

void to_json(nlohmann::json& j, const GaussianPrior& p) {
  j = nlohmann::json{{"mu", p.mu}, {"sigma", p.sigma}, {"degenerate", p.degenerate}};
}

void from_json(const nlohmann::json& j, GaussianPrior& p) {
  p.mu = j.at("mu").get<std::vector<double>>();
  p.sigma = j.at("sigma").get<std::vector<double>>();
  p.degenerate = j.value("degenerate", false);
  require(p.mu.size() == p.sigma.size() && !p.mu.empty(), ErrorKind::Io,
          "prior mu/sigma lengths differ");
  for (double s : p.sigma) require(s > 0.0, ErrorKind::Io, "prior sigma must be positive");
}

}  // namespace dprog
