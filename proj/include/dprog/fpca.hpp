#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dprog/paris_sim.hpp"

namespace dprog {

/// Discrete functional PCA of curves sampled on one shared equidistant grid.
///
/// Inner product: <f, g> = (1/n) sum_j f[j] g[j]. Basis rows are orthonormal
/// under it, scores are <v - mean, phi_k>, and eigenvalues are variances of
/// the scores over the training set (covariance normalised by N, not N-1).
///
/// Sign convention (version tag kSignConvention): every basis row has a
/// non-negative inner product with (curve with the largest terminal value -
/// mean); an exact tie is broken by making the last entry non-negative.
struct FpcaModel {
  static constexpr const char* kSignConvention = "max-terminal-v1";

  TimeGrid grid;
  std::vector<double> mean;
  std::vector<std::vector<double>> basis;
  std::vector<double> eigenvalues;
  /// Full spectrum of the centred covariance, descending, length N.
  std::vector<double> spectrum;
  double total_variance = 0.0;
  bool degenerate = false;

  std::size_t n_points() const { return mean.size(); }
  std::size_t components() const { return basis.size(); }
  double explained_fraction() const;
  /// Per-component explained fraction of the full spectrum (all zero when degenerate).
  std::vector<double> explained_fractions() const;
};

using ScoreVector = std::vector<double>;

struct FixedComponents {
  std::size_t k;
};
struct VarianceThreshold {
  double fraction;
};
using ComponentSelection = std::variant<FixedComponents, VarianceThreshold>;

double inner_product(std::span<const double> a, std::span<const double> b);

FpcaModel fit_fpca(std::span<const DamageCurve> curves, const ComponentSelection& selection);

ScoreVector project(const FpcaModel& model, std::span<const double> values);
std::vector<double> reconstruct(const FpcaModel& model, std::span<const double> scores);

void to_json(nlohmann::json& j, const FpcaModel& model);
void from_json(const nlohmann::json& j, FpcaModel& model);

}  // namespace dprog
