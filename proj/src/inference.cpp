#include "dprog/inference.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "dprog/error.hpp"
#include "dprog/io.hpp"
#include "dprog/seeding.hpp"

namespace dprog {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;
}

void PartialObservation::validate(std::size_t n_points) const {
  require(M() >= 1 && M() <= n_points, ErrorKind::DimensionMismatch,
          "observation count M=" + std::to_string(M()) + " outside [1, " +
              std::to_string(n_points) + "]");
  require(std::isfinite(noise_std_assumed) && noise_std_assumed > 0.0,
          ErrorKind::InvalidArgument, "assumed observation noise must be positive");
}

PartialObservation observe_prefix(const DamageCurve& curve, std::size_t M, double noise_std) {
  require(M >= 1 && M <= curve.values.size(), ErrorKind::InvalidArgument,
          "observe_prefix: M out of range");
  PartialObservation obs;
  obs.structure_id = curve.structure_id;
  obs.observed_values.assign(curve.values.begin(), curve.values.begin() + static_cast<long>(M));
  obs.noise_std_assumed = noise_std;
  obs.validate(curve.values.size());
  return obs;
}

void HmcConfig::validate() const {
  require(n_samples >= 1, ErrorKind::InvalidArgument, "hmc: n_samples must be >= 1");
  require(n_leapfrog >= 1, ErrorKind::InvalidArgument, "hmc: n_leapfrog must be >= 1");
  require(std::isfinite(step_size) && step_size > 0.0, ErrorKind::InvalidArgument,
          "hmc: step_size must be positive");
  require(target_accept > 0.0 && target_accept < 1.0, ErrorKind::InvalidArgument,
          "hmc: target_accept must be in (0, 1)");
  require(step_jitter >= 0.0 && step_jitter < 1.0, ErrorKind::InvalidArgument,
          "hmc: step_jitter must be in [0, 1)");
}

ScoreVector PosteriorSamples::mean() const {
  require(!draws.empty(), ErrorKind::InvalidArgument, "no posterior draws");
  ScoreVector m(draws.front().size(), 0.0);
  for (const auto& d : draws)
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += d[k];
  for (double& v : m) v /= static_cast<double>(draws.size());
  return m;
}

ScorePosterior::ScorePosterior(const FpcaModel& model, const GaussianPrior& prior)
    : prior_(prior) {
  require(prior.size() == model.components(), ErrorKind::DimensionMismatch,
          "prior has " + std::to_string(prior.size()) + " components, model has " +
              std::to_string(model.components()));
}

ScorePosterior::ScorePosterior(const FpcaModel& model, const GaussianPrior& prior,
                               const PartialObservation& obs)
    : ScorePosterior(model, prior) {
  obs.validate(model.n_points());
  likelihood_ = true;
  noise_std_ = obs.noise_std_assumed;
  const std::size_t M = obs.M();
  basis_.resize(model.components());
  for (std::size_t k = 0; k < basis_.size(); ++k)
    basis_[k].assign(model.basis[k].begin(), model.basis[k].begin() + static_cast<long>(M));
  centred_obs_.resize(M);
  for (std::size_t j = 0; j < M; ++j) centred_obs_[j] = obs.observed_values[j] - model.mean[j];
}

ScorePosterior ScorePosterior::prior_only(const FpcaModel& model, const GaussianPrior& prior) {
  return ScorePosterior(model, prior);
}

double ScorePosterior::log_density(std::span<const double> beta) const {
  double lp = log_prior_density(prior_, beta);
  if (!likelihood_) return lp;
  const std::size_t M = centred_obs_.size();
  double ss = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    double r = centred_obs_[j];
    for (std::size_t k = 0; k < basis_.size(); ++k) r -= beta[k] * basis_[k][j];
    ss += r * r;
  }
  const double Md = static_cast<double>(M);
  return lp - 0.5 * ss / (noise_std_ * noise_std_) - Md * std::log(noise_std_) - Md * kHalfLog2Pi;
}

std::vector<double> ScorePosterior::gradient(std::span<const double> beta) const {
  require(beta.size() == dim(), ErrorKind::DimensionMismatch,
          "gradient: expected " + std::to_string(dim()) + " scores, got " +
              std::to_string(beta.size()));
  std::vector<double> g(dim());
  for (std::size_t k = 0; k < g.size(); ++k)
    g[k] = -(beta[k] - prior_.mu[k]) / (prior_.sigma[k] * prior_.sigma[k]);
  if (!likelihood_) return g;
  const double inv_var = 1.0 / (noise_std_ * noise_std_);
  for (std::size_t j = 0; j < centred_obs_.size(); ++j) {
    double r = centred_obs_[j];
    for (std::size_t k = 0; k < basis_.size(); ++k) r -= beta[k] * basis_[k][j];
    for (std::size_t k = 0; k < basis_.size(); ++k) g[k] += r * inv_var * basis_[k][j];
  }
  return g;
}

double log_posterior(const FpcaModel& model, const GaussianPrior& prior,
                     const PartialObservation& obs, std::span<const double> beta) {
  return ScorePosterior(model, prior, obs).log_density(beta);
}

std::vector<double> grad_log_posterior(const FpcaModel& model, const GaussianPrior& prior,
                                       const PartialObservation& obs,
                                       std::span<const double> beta) {
  return ScorePosterior(model, prior, obs).gradient(beta);
}

void leapfrog(const ScorePosterior& target, std::vector<double>& q, std::vector<double>& p,
              double step, std::size_t n_steps) {
  auto g = target.gradient(q);
  for (std::size_t s = 0; s < n_steps; ++s) {
    for (std::size_t k = 0; k < q.size(); ++k) p[k] += 0.5 * step * g[k];
    for (std::size_t k = 0; k < q.size(); ++k) q[k] += step * p[k];
    g = target.gradient(q);
    for (std::size_t k = 0; k < q.size(); ++k) p[k] += 0.5 * step * g[k];
  }
}

namespace {

double kinetic(const std::vector<double>& p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return 0.5 * s;
}

struct Proposal {
  std::vector<double> q;
  double energy_change = 0.0;  // H(end) - H(start), +inf when non-finite
};

Proposal propose(const ScorePosterior& target, const std::vector<double>& q0, double logp0,
                 std::vector<double> p, double step, std::size_t n_steps) {
  Proposal out{q0, 0.0};
  const double h0 = -logp0 + kinetic(p);
  leapfrog(target, out.q, p, step, n_steps);
  const double h1 = -target.log_density(out.q) + kinetic(p);
  out.energy_change = std::isfinite(h1) ? h1 - h0 : INFINITY;
  return out;
}

double accept_prob(double energy_change) {
  return std::isfinite(energy_change) ? std::min(1.0, std::exp(-energy_change)) : 0.0;
}

// Doubles or halves the step until a single leapfrog step's acceptance
// probability crosses 1/2.
double initial_step_size(const ScorePosterior& target, const std::vector<double>& q,
                         double logp, double step, Rng& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> p(q.size());
  for (double& v : p) v = normal(rng);
  auto a = accept_prob(propose(target, q, logp, p, step, 1).energy_change);
  const double dir = a > 0.5 ? 1.0 : -1.0;
  for (int i = 0; i < 100; ++i) {
    if (std::pow(a, dir) <= std::pow(2.0, -dir)) break;
    step *= std::pow(2.0, dir);
    a = accept_prob(propose(target, q, logp, p, step, 1).energy_change);
  }
  return step;
}

}  // namespace

PosteriorSamples hmc_sample(const ScorePosterior& target, const HmcConfig& config) {
  config.validate();
  Rng rng(config.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<double> q = target.prior().mu;
  double logp = target.log_density(q);
  require(std::isfinite(logp), ErrorKind::Numerical,
          "hmc: log posterior is not finite at the initial point");

  double step = config.step_size;
  // Dual averaging state (Hoffman & Gelman 2014, defaults gamma=0.05, t0=10, kappa=0.75).
  double log_step_bar = std::log(step);
  double h_bar = 0.0;
  double mu_da = 0.0;
  if (config.adapt_step_size && config.n_warmup > 0) {
    step = initial_step_size(target, q, logp, step, rng);
    mu_da = std::log(10.0 * step);
    log_step_bar = 0.0;
  }

  PosteriorSamples out;
  out.config = config;
  out.draws.reserve(config.n_samples);
  std::size_t accepted = 0;
  double abs_energy = 0.0;
  std::vector<double> p(q.size());

  const std::size_t total = config.n_warmup + config.n_samples;
  for (std::size_t it = 0; it < total; ++it) {
    const bool warmup = it < config.n_warmup;
    if (!warmup && it == config.n_warmup && config.adapt_step_size)
      step = std::exp(log_step_bar);

    for (double& v : p) v = normal(rng);
    const double jitter = 1.0 + config.step_jitter * (2.0 * unif(rng) - 1.0);
    auto prop = propose(target, q, logp, p, step * jitter, config.n_leapfrog);
    const double alpha = accept_prob(prop.energy_change);
    if (unif(rng) < alpha) {
      q = std::move(prop.q);
      logp = target.log_density(q);
      if (!warmup) ++accepted;
    }

    if (warmup && config.adapt_step_size) {
      const double m = static_cast<double>(it + 1);
      constexpr double gamma = 0.05, t0 = 10.0, kappa = 0.75;
      h_bar = (1.0 - 1.0 / (m + t0)) * h_bar + (config.target_accept - alpha) / (m + t0);
      const double log_step = mu_da - std::sqrt(m) / gamma * h_bar;
      const double w = std::pow(m, -kappa);
      log_step_bar = w * log_step + (1.0 - w) * log_step_bar;
      step = std::exp(log_step);
    }
    if (!warmup) {
      abs_energy += std::isfinite(prop.energy_change) ? std::abs(prop.energy_change) : 0.0;
      out.draws.push_back(q);
    }
  }

  out.step_size = step;
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(config.n_samples);
  out.mean_abs_energy_error = abs_energy / static_cast<double>(config.n_samples);
  out.low_acceptance = out.acceptance_rate < 0.05;
  return out;
}

PosteriorSamples hmc_sample(const FpcaModel& model, const GaussianPrior& prior,
                            const PartialObservation& obs, const HmcConfig& config) {
  return hmc_sample(ScorePosterior(model, prior, obs), config);
}

std::vector<double> predict_curve(const FpcaModel& model, std::span<const double> beta) {
  return reconstruct(model, beta);
}

std::vector<double> posterior_point_prediction(const PosteriorSamples& samples,
                                               const FpcaModel& model) {
  return reconstruct(model, samples.mean());
}

void write_draws(const PosteriorSamples& samples, const std::filesystem::path& csv_path) {
  io::CsvTable t;
  t.header = {"draw"};
  const std::size_t K = samples.draws.empty() ? 0 : samples.draws.front().size();
  for (std::size_t k = 0; k < K; ++k) t.header.push_back("beta_" + std::to_string(k + 1));
  for (std::size_t s = 0; s < samples.draws.size(); ++s) {
    std::vector<std::string> row{std::to_string(s)};
    for (double b : samples.draws[s]) row.push_back(io::format_double(b));
    t.rows.push_back(std::move(row));
  }
  io::write_file_atomic(csv_path, t.to_string());

  const auto& c = samples.config;
  nlohmann::ordered_json meta;
  meta["n_samples"] = c.n_samples;
  meta["n_warmup"] = c.n_warmup;
  meta["initial_step_size"] = c.step_size;
  meta["adapted_step_size"] = samples.step_size;
  meta["n_leapfrog"] = c.n_leapfrog;
  meta["seed"] = c.seed;
  meta["acceptance_rate"] = samples.acceptance_rate;
  meta["low_acceptance"] = samples.low_acceptance;
  auto meta_path = csv_path;
  meta_path.replace_extension(".json");
  io::write_file_atomic(meta_path, meta.dump(2) + "\n");
}

}  // namespace dprog
