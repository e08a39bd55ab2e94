#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "dprog/error.hpp"
#include "dprog/prior.hpp"

using namespace dprog;
using doctest::Approx;

TEST_CASE("fit_gaussian_prior by hand") {
  const std::vector<ScoreVector> s{{1.0}, {3.0}};
  const auto p = fit_gaussian_prior(s);
  CHECK(p.mu[0] == 2.0);
  CHECK(p.sigma[0] == Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_FALSE(p.degenerate);
}

TEST_CASE("zero spread is floored and flagged") {
  const std::vector<ScoreVector> s{{5.0}, {5.0}, {5.0}};
  const auto p = fit_gaussian_prior(s);
  CHECK(p.mu[0] == 5.0);
  CHECK(p.sigma[0] == Approx(5e-6).epsilon(1e-12));
  CHECK(p.degenerate);

  const std::vector<ScoreVector> z{{0.0}, {0.0}};
  CHECK(fit_gaussian_prior(z).sigma[0] == Approx(1e-6).epsilon(1e-12));
}

TEST_CASE("log_prior_density closed forms") {
  CHECK(log_prior_density({{0.0}, {1.0}}, std::vector<double>{0.0}) ==
        Approx(-0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-15));
  CHECK(log_prior_density({{2.0}, {std::sqrt(2.0)}}, std::vector<double>{2.0}) ==
        Approx(-0.5 * std::log(4 * std::numbers::pi)).epsilon(1e-14));
  CHECK_THROWS_AS(log_prior_density({{0.0}, {1.0}}, std::vector<double>{0.0, 1.0}), Error);
}

TEST_CASE("density integrates to one") {
  for (const auto& [mu, sigma] : {std::pair{0.0, 1.0}, {2.0, 0.3}, {-1.5, 4.0}}) {
    const GaussianPrior p{{mu}, {sigma}};
    // Composite Simpson on [mu - 8 sigma, mu + 8 sigma].
    const int n = 4000;
    const double a = mu - 8 * sigma, h = 16 * sigma / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
      s += w * std::exp(log_prior_density(p, std::vector<double>{a + i * h}));
    }
    CHECK(std::abs(s * h / 3 - 1.0) < 1e-6);
  }
}

TEST_CASE("density peaks at the mean and is concave") {
  const GaussianPrior p{{0.5, -1.0}, {0.7, 2.0}};
  const double at_mu = log_prior_density(p, p.mu);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> a{z(rng), z(rng)}, b{z(rng), z(rng)};
    CHECK(log_prior_density(p, a) <= at_mu);
    const std::vector<double> mid{(a[0] + b[0]) / 2, (a[1] + b[1]) / 2};
    CHECK(log_prior_density(p, mid) >=
          0.5 * (log_prior_density(p, a) + log_prior_density(p, b)) - 1e-12);
  }
}

TEST_CASE("fit properties") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ScoreVector> s;
    for (int i = 0; i < 3 + trial % 4; ++i) s.push_back({z(rng), 3 * z(rng)});
    const auto p = fit_gaussian_prior(s);

    auto shuffled = s;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto q = fit_gaussian_prior(shuffled);
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(q.mu[k] == Approx(p.mu[k]).epsilon(1e-12));
      CHECK(q.sigma[k] == Approx(p.sigma[k]).epsilon(1e-12));
    }

    auto with_mean = s;
    with_mean.push_back(p.mu);
    const auto r = fit_gaussian_prior(with_mean);
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(r.mu[k] == Approx(p.mu[k]).epsilon(1e-12));
      CHECK(r.sigma[k] <= p.sigma[k]);
    }
  }
}

TEST_CASE("fit input errors and JSON") {
  CHECK_THROWS_AS(fit_gaussian_prior(std::vector<ScoreVector>{{1.0}}), Error);
  CHECK_THROWS_AS(fit_gaussian_prior(std::vector<ScoreVector>{{1.0}, {1.0, 2.0}}), Error);
  const GaussianPrior p{{0.25}, {1.5}, false};
  const nlohmann::json j = p;
  const auto r = j.get<GaussianPrior>();
  CHECK(r.mu == p.mu);
  CHECK(r.sigma == p.sigma);
  nlohmann::json bad = j;
  bad["sigma"] = {0.0};
  CHECK_THROWS_AS(bad.get<GaussianPrior>(), Error);
}
