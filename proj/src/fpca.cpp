#include "dprog/fpca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "dprog/error.hpp"

namespace dprog {

double inner_product(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size() && !a.empty(), ErrorKind::DimensionMismatch,
          "inner product of vectors of different length");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s / static_cast<double>(a.size());
}

double FpcaModel::explained_fraction() const {
  if (degenerate || total_variance <= 0.0) return 0.0;
  return std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0) / total_variance;
}

std::vector<double> FpcaModel::explained_fractions() const {
  std::vector<double> out(spectrum.size(), 0.0);
  if (degenerate || total_variance <= 0.0) return out;
  for (std::size_t i = 0; i < spectrum.size(); ++i) out[i] = spectrum[i] / total_variance;
  return out;
}

FpcaModel fit_fpca(std::span<const DamageCurve> curves, const ComponentSelection& selection) {
  require(curves.size() >= 2, ErrorKind::InvalidArgument, "fit_fpca needs at least 2 curves");
  const auto& grid = curves.front().grid;
  const std::size_t n = grid.size();
  for (const auto& c : curves) {
    require(c.grid == grid, ErrorKind::DimensionMismatch, "fit_fpca: curves do not share a grid");
    require(c.values.size() == n, ErrorKind::DimensionMismatch,
            "fit_fpca: curve length differs from grid");
  }
  if (const auto* t = std::get_if<VarianceThreshold>(&selection))
    require(t->fraction > 0.0 && t->fraction <= 1.0, ErrorKind::InvalidArgument,
            "variance threshold must be in (0, 1]");
  if (const auto* k = std::get_if<FixedComponents>(&selection))
    require(k->k >= 1 && k->k <= n, ErrorKind::InvalidArgument,
            "fixed component count must be in [1, n_points]");

  const std::size_t N = curves.size();
  Eigen::MatrixXd X(N, n);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < n; ++j) X(i, j) = curves[i].values[j];

  FpcaModel model;
  model.grid = grid;
  Eigen::RowVectorXd mean = X.colwise().mean();
  X.rowwise() -= mean;
  model.mean.assign(mean.data(), mean.data() + n);

  const double norm = static_cast<double>(N) * static_cast<double>(n);
  const Eigen::MatrixXd cov = (X.transpose() * X) / norm;
  model.total_variance = X.squaredNorm() / norm;
  model.degenerate = !(model.total_variance > 0.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  require(eig.info() == Eigen::Success, ErrorKind::Numerical, "eigendecomposition failed");
  // Eigen sorts ascending.
  const Eigen::VectorXd evals = eig.eigenvalues().reverse();
  const Eigen::MatrixXd evecs = eig.eigenvectors().rowwise().reverse();

  const std::size_t rank_cap = std::min(N, n);
  model.spectrum.resize(rank_cap);
  for (std::size_t k = 0; k < rank_cap; ++k)
    model.spectrum[k] = model.degenerate ? 0.0 : std::max(evals(static_cast<Eigen::Index>(k)), 0.0);

  std::size_t K = 1;
  if (const auto* fixed = std::get_if<FixedComponents>(&selection)) {
    K = fixed->k;
  } else if (!model.degenerate) {
    const double target = std::get<VarianceThreshold>(selection).fraction;
    double cum = 0.0;
    K = rank_cap;
    for (std::size_t k = 0; k < rank_cap; ++k) {
      cum += model.spectrum[k];
      if (cum / model.total_variance >= target - 1e-12) {
        K = k + 1;
        break;
      }
    }
  }

  // Direction used to orient each component.
  std::size_t imax = 0;
  for (std::size_t i = 1; i < N; ++i)
    if (curves[i].values.back() > curves[imax].values.back()) imax = i;
  const Eigen::RowVectorXd towards_fast = X.row(static_cast<Eigen::Index>(imax));

  const double scale = std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k < K; ++k) {
    Eigen::VectorXd phi = evecs.col(static_cast<Eigen::Index>(k)) * scale;
    const double ip = towards_fast.dot(phi);
    const double tie_tol = 1e-12 * towards_fast.norm() * phi.norm();
    if (ip < -tie_tol || (std::abs(ip) <= tie_tol && phi(phi.size() - 1) < 0.0)) phi = -phi;
    model.basis.emplace_back(phi.data(), phi.data() + n);
    double lambda = k < rank_cap && !model.degenerate ? std::max(evals(static_cast<Eigen::Index>(k)), 0.0) : 0.0;
    model.eigenvalues.push_back(lambda);
  }
  return model;
}

ScoreVector project(const FpcaModel& model, std::span<const double> values) {
  require(values.size() == model.n_points(), ErrorKind::DimensionMismatch,
          "project: expected " + std::to_string(model.n_points()) + " values, got " +
              std::to_string(values.size()));
  std::vector<double> centred(values.begin(), values.end());
  for (std::size_t j = 0; j < centred.size(); ++j) centred[j] -= model.mean[j];
  ScoreVector s(model.components());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = inner_product(centred, model.basis[k]);
  return s;
}

std::vector<double> reconstruct(const FpcaModel& model, std::span<const double> scores) {
  require(scores.size() == model.components(), ErrorKind::DimensionMismatch,
          "reconstruct: expected " + std::to_string(model.components()) + " scores, got " +
              std::to_string(scores.size()));
  std::vector<double> out = model.mean;
  for (std::size_t k = 0; k < scores.size(); ++k)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += scores[k] * model.basis[k][j];
  return out;
}

void to_json(nlohmann::json& j, const FpcaModel& m) {
  j = nlohmann::json{
      {"sign_convention", FpcaModel::kSignConvention},
      {"cycles", m.grid.cycles},
      {"mean", m.mean},
      {"K", m.components()},
      {"basis", m.basis},
      {"eigenvalues", m.eigenvalues},
      {"spectrum", m.spectrum},
      {"total_variance", m.total_variance},
      {"degenerate", m.degenerate},
  };
}

void from_json(const nlohmann::json& j, FpcaModel& m) {
  const auto tag = j.at("sign_convention").get<std::string>();
  require(tag == FpcaModel::kSignConvention, ErrorKind::Io,
          "unsupported fPCA sign convention '" + tag + "'");
  m.grid.cycles = j.at("cycles").get<std::vector<double>>();
  m.grid.validate();
  m.mean = j.at("mean").get<std::vector<double>>();
  m.basis = j.at("basis").get<std::vector<std::vector<double>>>();
  m.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  m.spectrum = j.at("spectrum").get<std::vector<double>>();
  m.total_variance = j.at("total_variance").get<double>();
  m.degenerate = j.at("degenerate").get<bool>();
  const auto K = j.at("K").get<std::size_t>();
  require(m.mean.size() == m.grid.size(), ErrorKind::Io, "model mean length differs from grid");
  require(K == m.basis.size() && K == m.eigenvalues.size() && K >= 1, ErrorKind::Io,
          "model K disagrees with basis/eigenvalues");
  for (const auto& row : m.basis)
    require(row.size() == m.grid.size(), ErrorKind::Io, "basis row length differs from grid");
}

}  // namespace dprog
