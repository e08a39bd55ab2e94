#include "dprog/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "dprog/error.hpp"

namespace dprog::criteria {

nlohmann::ordered_json to_json(const Outcome& o) {
  return {{"id", o.id},
          {"name", o.name},
          {"status", !o.evaluated ? "not-evaluated" : o.pass ? "pass" : "fail"},
          {"detail", o.detail}};
}

Outcome variance_concentration(std::span<const DamageCurve> training, double threshold) {
  const auto model = fit_fpca(training, VarianceThreshold{threshold});
  Outcome o{1, "variance-concentration", false, {}};
  const double f = model.explained_fraction();
  o.pass = model.components() == 1 && f >= 0.95;
  std::ostringstream ss;
  ss.precision(12);
  ss << "K=" << model.components() << " explained=" << f;
  o.detail = ss.str();
  return o;
}

namespace {

std::vector<std::size_t> ranking(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  return idx;
}

}  // namespace

Outcome score_growth_ordering(std::span<const DamageCurve> training,
                              const ComponentSelection& selection) {
  const auto model = fit_fpca(training, selection);
  std::vector<double> score, terminal;
  for (const auto& c : training) {
    score.push_back(project(model, c.values)[0]);
    terminal.push_back(c.values.back());
  }
  Outcome o{2, "score-growth-ordering", ranking(score) == ranking(terminal), {}};
  std::ostringstream ss;
  for (std::size_t i = 0; i < training.size(); ++i)
    ss << (i ? " " : "") << training[i].structure_id << ":score=" << score[i]
       << ",terminal=" << terminal[i];
  o.detail = ss.str();
  return o;
}

bool outliers_exceed_inliers(const AllocationDecision& d, const std::vector<std::string>& outliers,
                             const std::vector<std::string>& inliers) {
  double lowest_outlier = INFINITY, highest_inlier = -INFINITY;
  for (const auto& id : outliers) lowest_outlier = std::min(lowest_outlier, d.candidate_errors.at(id));
  for (const auto& id : inliers) highest_inlier = std::max(highest_inlier, d.candidate_errors.at(id));
  return lowest_outlier > highest_inlier;
}

bool errors_decay(const MonitorResult& r, std::size_t early_M, std::size_t late_M,
                  std::string* detail) {
  const auto& early = r.records.at(early_M);
  const auto& late = r.records.at(late_M);
  bool all = true;
  std::ostringstream ss;
  for (const auto& e : early) {
    auto it = std::find_if(late.begin(), late.end(),
                           [&](const ErrorRecord& l) { return l.structure_id == e.structure_id; });
    require(it != late.end(), ErrorKind::InvalidArgument, "missing record for " + e.structure_id);
    const double m_early = e.median_error();
    const double m_late = it->median_error();
    all = all && m_late < m_early;
    ss << e.structure_id << ":" << m_early << "->" << m_late << " ";
  }
  if (detail) *detail = ss.str();
  return all;
}

bool informed_beats_baseline(const EvaluationResult& r, const std::string& candidate,
                             std::size_t min_M, std::string* detail) {
  const std::string tag = "updated-with-" + candidate;
  auto it = std::find_if(r.variants.begin(), r.variants.end(),
                         [&](const VariantResult& v) { return v.tag == tag; });
  require(it != r.variants.end(), ErrorKind::InvalidArgument, "no variant " + tag);
  const double informed = variant_mean_error(*it, min_M);
  const double baseline = baseline_mean_error(r, min_M);
  if (detail) {
    std::ostringstream ss;
    ss << tag << "=" << informed << " baseline=" << baseline;
    *detail = ss.str();
  }
  return informed < baseline;
}

Outcome prior_shift(const EvaluationResult& r, const std::string& candidate) {
  Outcome o{8, "prior-shift-direction", true, {}};
  const std::string tag = "updated-with-" + candidate;
  auto it = std::find_if(r.variants.begin(), r.variants.end(),
                         [&](const VariantResult& v) { return v.tag == tag; });
  require(it != r.variants.end(), ErrorKind::InvalidArgument, "no variant " + tag);
  double beta = -INFINITY;
  for (const auto& s : it->model.training_scores) beta = std::max(beta, s[0]);

  auto density = [&](const GaussianPrior& p) {
    const double z = (beta - p.mu[0]) / p.sigma[0];
    return std::exp(-0.5 * z * z) / (p.sigma[0] * std::sqrt(2.0 * std::numbers::pi));
  };
  const double own = density(it->model.prior);
  std::ostringstream ss;
  ss << "beta=" << beta << " " << tag << "=" << own;
  for (const auto& v : r.variants) {
    if (v.tag == tag || v.tag == "not-updated") continue;
    const double d = density(v.model.prior);
    ss << " " << v.tag << "=" << d;
    o.pass = o.pass && own > d;
  }
  o.detail = ss.str();
  return o;
}

Outcome duplicate_update_stability(std::span<const DamageCurve> training,
                                   const ComponentSelection& selection) {
  Outcome o{9, "duplicate-update-stability", true, {}};
  const auto base = build_prognosis_model(training, selection);
  const auto base_fracs = base.fpca.explained_fractions();
  double worst_spectrum = 0.0;
  double worst_sigma_ratio = 0.0;
  for (const auto& c : training) {
    const auto upd = update_model(training, c, selection);
    const auto fr = upd.fpca.explained_fractions();
    const std::size_t n = std::min(fr.size(), base_fracs.size());
    for (std::size_t k = 0; k < n; ++k)
      worst_spectrum = std::max(worst_spectrum, std::abs(fr[k] - base_fracs[k]));
    for (std::size_t k = 0; k < std::min(upd.prior.size(), base.prior.size()); ++k)
      worst_sigma_ratio = std::max(worst_sigma_ratio, upd.prior.sigma[k] / base.prior.sigma[k]);
  }
  const bool spectrum_ok = worst_spectrum <= 1e-8;
  const bool sigma_ok = worst_sigma_ratio <= 1.0;
  o.pass = spectrum_ok && sigma_ok;
  std::ostringstream ss;
  ss << "max |delta explained fraction|=" << worst_spectrum << (spectrum_ok ? " (ok)" : " (>1e-8)")
     << " max sigma ratio=" << worst_sigma_ratio << (sigma_ok ? " (ok)" : " (>1)");
  o.detail = ss.str();
  return o;
}

}  // namespace dprog::criteria
