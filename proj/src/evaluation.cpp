#include "dprog/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dprog/error.hpp"
#include "dprog/io.hpp"

namespace dprog {

PopulationStats population_stats(std::span<const DamageCurve> truths) {
  require(truths.size() >= 2, ErrorKind::InvalidArgument,
          "population_stats needs at least 2 curves");
  std::vector<double> y;
  for (const auto& c : truths) {
    require(!c.values.empty(), ErrorKind::InvalidArgument, "empty curve");
    y.push_back(c.values.back());
  }
  PopulationStats s;
  s.y_max = *std::max_element(y.begin(), y.end());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  s.sigma_terminal = std::sqrt(ss / static_cast<double>(y.size() - 1));
  return s;
}

double weighted_terminal_error(double y_hat, double y, double y_max, double sigma_terminal) {
  require(y_max > 0.0, ErrorKind::InvalidArgument, "y_max must be positive");
  require(sigma_terminal > 0.0, ErrorKind::InvalidArgument, "terminal spread must be positive");
  const double r = y_hat - y;
  return 100.0 * y / (y_max * sigma_terminal * sigma_terminal) * r * r;
}

double TerminalErrorSet::mean() const {
  require(!per_draw_weighted_errors.empty(), ErrorKind::InvalidArgument, "empty error set");
  return std::accumulate(per_draw_weighted_errors.begin(), per_draw_weighted_errors.end(), 0.0) /
         static_cast<double>(per_draw_weighted_errors.size());
}

double TerminalErrorSet::median() const {
  require(!per_draw_weighted_errors.empty(), ErrorKind::InvalidArgument, "empty error set");
  auto v = per_draw_weighted_errors;
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

TerminalErrorSet terminal_error_set(const PosteriorSamples& samples, const FpcaModel& model,
                                    const DamageCurve& truth, const PopulationStats& stats,
                                    std::string model_tag, std::size_t M) {
  require(truth.values.size() == model.n_points(), ErrorKind::DimensionMismatch,
          "terminal_error_set: truth length differs from model grid");
  require(!samples.draws.empty(), ErrorKind::InvalidArgument, "terminal_error_set: no draws");
  const std::size_t last = model.n_points() - 1;
  const double y = truth.values.back();

  TerminalErrorSet out;
  out.structure_id = truth.structure_id;
  out.M = M;
  out.model_tag = std::move(model_tag);
  out.per_draw_weighted_errors.reserve(samples.draws.size());
  for (const auto& d : samples.draws) {
    double y_hat = model.mean[last];
    for (std::size_t k = 0; k < d.size(); ++k) y_hat += d[k] * model.basis[k][last];
    out.per_draw_weighted_errors.push_back(
        weighted_terminal_error(y_hat, y, stats.y_max, stats.sigma_terminal));
  }
  const auto point = posterior_point_prediction(samples, model);
  out.point_estimate_error = weighted_terminal_error(point[last], y, stats.y_max, stats.sigma_terminal);
  return out;
}

double WeightedSample::mean() const {
  require(!values.empty() && values.size() == weights.size(), ErrorKind::InvalidArgument,
          "weighted sample is empty or inconsistent");
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += weights[i] * values[i];
  return m;
}

WeightedSample unweighted(std::vector<double> values) {
  require(!values.empty(), ErrorKind::InvalidArgument, "empty sample");
  WeightedSample s;
  s.weights.assign(values.size(), 1.0 / static_cast<double>(values.size()));
  s.values = std::move(values);
  return s;
}

WeightedSample random_baseline(std::span<const std::vector<double>> error_sets) {
  require(!error_sets.empty(), ErrorKind::InvalidArgument, "random_baseline: no candidate sets");
  WeightedSample out;
  const double per_set = 1.0 / static_cast<double>(error_sets.size());
  for (const auto& set : error_sets) {
    require(!set.empty(), ErrorKind::InvalidArgument, "random_baseline: empty candidate set");
    const double w = per_set / static_cast<double>(set.size());
    for (double v : set) {
      out.values.push_back(v);
      out.weights.push_back(w);
    }
  }
  return out;
}

DensityGrid kernel_density(const WeightedSample& sample, std::size_t n_grid) {
  require(n_grid >= 2, ErrorKind::InvalidArgument, "density grid needs >= 2 points");
  const double mean = sample.mean();
  double var = 0.0;
  double n_eff_denom = 0.0;
  for (std::size_t i = 0; i < sample.values.size(); ++i) {
    var += sample.weights[i] * (sample.values[i] - mean) * (sample.values[i] - mean);
    n_eff_denom += sample.weights[i] * sample.weights[i];
  }
  const double sd = std::sqrt(var);
  const double n_eff = 1.0 / n_eff_denom;

  // Weighted interquartile range.
  std::vector<std::size_t> order(sample.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return sample.values[a] < sample.values[b]; });
  auto quantile = [&](double q) {
    double cum = 0.0;
    for (auto i : order) {
      cum += sample.weights[i];
      if (cum >= q) return sample.values[i];
    }
    return sample.values[order.back()];
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  if (!(spread > 0.0)) spread = std::max(std::abs(mean), 1.0) * 1e-6;

  DensityGrid g;
  g.bandwidth = 0.9 * spread * std::pow(n_eff, -0.2);
  const double h = g.bandwidth;
  const double lo = sample.values[order.front()] - 5.0 * h;
  const double hi = sample.values[order.back()] + 5.0 * h;
  // Keep the grid spacing at or below h/4 so the grid resolves every kernel.
  const auto needed = static_cast<std::size_t>(std::ceil((hi - lo) / (0.25 * h))) + 1;
  const std::size_t n = std::min<std::size_t>(std::max(n_grid, needed), 1u << 16);
  const double dx = (hi - lo) / static_cast<double>(n - 1);

  // Linear binning onto the grid, then a truncated (+-6h) kernel sum.
  std::vector<double> bins(n, 0.0);
  for (std::size_t i = 0; i < sample.values.size(); ++i) {
    const double pos = (sample.values[i] - lo) / dx;
    const auto left = std::min(static_cast<std::size_t>(pos), n - 2);
    const double frac = pos - static_cast<double>(left);
    bins[left] += sample.weights[i] * (1.0 - frac);
    bins[left + 1] += sample.weights[i] * frac;
  }
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(6.0 * h / dx));
  std::vector<double> kernel(static_cast<std::size_t>(reach) + 1);
  const double norm = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi));
  for (std::ptrdiff_t d = 0; d <= reach; ++d) {
    const double z = static_cast<double>(d) * dx / h;
    kernel[static_cast<std::size_t>(d)] = norm * std::exp(-0.5 * z * z);
  }

  g.x.resize(n);
  g.density.assign(n, 0.0);
  const auto sn = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t l = 0; l < sn; ++l) {
    const double c = bins[static_cast<std::size_t>(l)];
    if (c == 0.0) continue;
    const auto from = std::max<std::ptrdiff_t>(0, l - reach);
    const auto to = std::min<std::ptrdiff_t>(sn - 1, l + reach);
    for (std::ptrdiff_t k = from; k <= to; ++k)
      g.density[static_cast<std::size_t>(k)] += c * kernel[static_cast<std::size_t>(std::abs(k - l))];
  }
  for (std::size_t k = 0; k < n; ++k) g.x[k] = lo + dx * static_cast<double>(k);
  return g;
}

void append_error_rows(std::vector<std::vector<std::string>>& rows, const TerminalErrorSet& set) {
  for (std::size_t s = 0; s < set.per_draw_weighted_errors.size(); ++s)
    rows.push_back({set.model_tag, set.structure_id, std::to_string(set.M), std::to_string(s),
                    io::format_double(set.per_draw_weighted_errors[s])});
}

}  // namespace dprog
