#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dprog/fpca.hpp"
#include "dprog/prior.hpp"

namespace dprog {

/// The first M grid values of a structure, observed with Gaussian noise of
/// known scale.
struct PartialObservation {
  std::string structure_id;
  std::vector<double> observed_values;
  double noise_std_assumed = 1.0;

  std::size_t M() const { return observed_values.size(); }
  void validate(std::size_t n_points) const;
};

/// First `M` values of `curve` as an observation.
PartialObservation observe_prefix(const DamageCurve& curve, std::size_t M, double noise_std);

struct HmcConfig {
  std::size_t n_samples = 2000;
  std::size_t n_warmup = 500;
  double step_size = 0.1;
  std::size_t n_leapfrog = 20;
  std::uint64_t seed = 0;
  /// Dual-averaging adaptation of step_size during warmup.
  bool adapt_step_size = true;
  double target_accept = 0.8;
  /// Each trajectory uses step * U(1 - jitter, 1 + jitter).
  double step_jitter = 0.1;

  void validate() const;
};

struct PosteriorSamples {
  std::vector<ScoreVector> draws;
  double acceptance_rate = 0.0;
  /// Step size used after warmup.
  double step_size = 0.0;
  /// Mean |H(end) - H(start)| over post-warmup proposals.
  double mean_abs_energy_error = 0.0;
  bool low_acceptance = false;
  HmcConfig config;

  ScoreVector mean() const;
};

/// Log posterior over scores: Gaussian prior plus independent Gaussian
/// likelihood of the observed prefix, all normalising constants included.
/// The likelihood can be switched off to sample the prior alone.
class ScorePosterior {
 public:
  ScorePosterior(const FpcaModel& model, const GaussianPrior& prior, const PartialObservation& obs);

  static ScorePosterior prior_only(const FpcaModel& model, const GaussianPrior& prior);

  std::size_t dim() const { return prior_.size(); }
  double log_density(std::span<const double> beta) const;
  std::vector<double> gradient(std::span<const double> beta) const;
  const GaussianPrior& prior() const { return prior_; }

 private:
  ScorePosterior(const FpcaModel& model, const GaussianPrior& prior);

  GaussianPrior prior_;
  bool likelihood_ = false;
  double noise_std_ = 1.0;
  // basis_[k][j] for the observed prefix j < M, and obs - mean on the prefix.
  std::vector<std::vector<double>> basis_;
  std::vector<double> centred_obs_;
};

double log_posterior(const FpcaModel& model, const GaussianPrior& prior,
                     const PartialObservation& obs, std::span<const double> beta);

std::vector<double> grad_log_posterior(const FpcaModel& model, const GaussianPrior& prior,
                                       const PartialObservation& obs,
                                       std::span<const double> beta);

/// `n_steps` leapfrog steps of the Hamiltonian -log p(q) + |p|^2 / 2 with
/// identity mass, updating position and momentum in place.
void leapfrog(const ScorePosterior& target, std::vector<double>& position,
              std::vector<double>& momentum, double step, std::size_t n_steps);

PosteriorSamples hmc_sample(const ScorePosterior& target, const HmcConfig& config);

PosteriorSamples hmc_sample(const FpcaModel& model, const GaussianPrior& prior,
                            const PartialObservation& obs, const HmcConfig& config);

/// Full-length prognosis curve for a score vector, including j >= M.
std::vector<double> predict_curve(const FpcaModel& model, std::span<const double> beta);

/// Reconstruction at the posterior-mean score vector.
std::vector<double> posterior_point_prediction(const PosteriorSamples& samples,
                                               const FpcaModel& model);

/// One row per draw (`draw,beta_1..beta_K`) plus a JSON sidecar holding the
/// sampler configuration and acceptance rate.
void write_draws(const PosteriorSamples& samples, const std::filesystem::path& csv_path);

}  // namespace dprog
