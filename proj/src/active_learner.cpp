#include "dprog/active_learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "dprog/error.hpp"
#include "dprog/io.hpp"

namespace dprog {

PrognosisModel build_prognosis_model(std::span<const DamageCurve> curves,
                                     const ComponentSelection& selection) {
  PrognosisModel m;
  m.fpca = fit_fpca(curves, selection);
  for (const auto& c : curves) {
    m.training_scores.push_back(project(m.fpca, c.values));
    m.training_ids.push_back(c.structure_id);
  }
  m.prior = fit_gaussian_prior(m.training_scores);
  return m;
}

PrognosisModel update_model(std::span<const DamageCurve> training_curves,
                            const DamageCurve& new_curve, const ComponentSelection& selection) {
  require(!training_curves.empty() && new_curve.grid == training_curves.front().grid,
          ErrorKind::DimensionMismatch, "update_model: new curve grid differs from training grid");
  std::vector<DamageCurve> augmented(training_curves.begin(), training_curves.end());
  augmented.push_back(new_curve);
  return build_prognosis_model(augmented, selection);
}

double ErrorRecord::median_error() const {
  require(!per_draw_errors.empty(), ErrorKind::InvalidArgument, "empty error record");
  auto v = per_draw_errors;
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return 0.5 * (lower + upper);
}

double mse_error(std::span<const double> predicted, const PartialObservation& obs) {
  const std::size_t M = obs.M();
  require(M >= 1, ErrorKind::InvalidArgument, "mse_error: no observed points");
  require(predicted.size() >= M, ErrorKind::DimensionMismatch,
          "mse_error: prediction shorter than the observed prefix");
  double s = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    const double r = predicted[j] - obs.observed_values[j];
    s += r * r;
  }
  return s / static_cast<double>(M);
}

ErrorRecord error_record(const PosteriorSamples& samples, const FpcaModel& model,
                         const PartialObservation& obs) {
  require(!samples.draws.empty(), ErrorKind::InvalidArgument, "error_record: no draws");
  ErrorRecord r;
  r.structure_id = obs.structure_id;
  r.M = obs.M();
  r.per_draw_errors.reserve(samples.draws.size());
  for (const auto& d : samples.draws) r.per_draw_errors.push_back(mse_error(reconstruct(model, d), obs));
  r.mean_error = std::accumulate(r.per_draw_errors.begin(), r.per_draw_errors.end(), 0.0) /
                 static_cast<double>(r.per_draw_errors.size());
  return r;
}

AllocationDecision select_structure(std::span<const ErrorRecord> records,
                                    SelectionStatistic statistic) {
  require(!records.empty(), ErrorKind::InvalidArgument, "select_structure: no candidates");
  AllocationDecision d;
  d.decision_step = records.front().M;
  d.statistic = statistic;
  for (const auto& r : records) {
    require(r.M == d.decision_step, ErrorKind::InvalidArgument,
            "select_structure: records at mixed observation counts");
    const double e = statistic == SelectionStatistic::Mean ? r.mean_error : r.median_error();
    require(d.candidate_errors.emplace(r.structure_id, e).second, ErrorKind::InvalidArgument,
            "select_structure: duplicate structure id " + r.structure_id);
  }
  // std::map iterates ids in ascending order, so the first maximum wins ties.
  double best = -INFINITY;
  for (const auto& [id, e] : d.candidate_errors) {
    if (e > best) {
      best = e;
      d.selected_structure_id = id;
    }
  }
  return d;
}

DamageCurve splice_curve(std::span<const double> interpolated, const DamageCurve& tail,
                         std::size_t M_star) {
  require(tail.fidelity == Fidelity::High, ErrorKind::InvalidArgument,
          "splice_curve: tail must be a High fidelity curve");
  const std::size_t n = tail.values.size();
  require(interpolated.size() == n, ErrorKind::DimensionMismatch,
          "splice_curve: interpolated length differs from tail");
  require(M_star >= 1 && M_star < n, ErrorKind::InvalidArgument,
          "splice_curve: M_star must be in [1, n_points)");
  DamageCurve out = tail;
  std::copy(interpolated.begin(), interpolated.begin() + static_cast<long>(M_star), out.values.begin());
  out.splice_index = M_star;
  return out;
}

void write_error_records(std::span<const ErrorRecord> records, const std::filesystem::path& path) {
  io::CsvTable t;
  t.header = {"structure_id", "M", "draw_index", "error"};
  for (const auto& r : records)
    for (std::size_t s = 0; s < r.per_draw_errors.size(); ++s)
      t.rows.push_back({r.structure_id, std::to_string(r.M), std::to_string(s),
                        io::format_double(r.per_draw_errors[s])});
  io::write_file_atomic(path, t.to_string());
}

void write_decision(const AllocationDecision& d, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["selected_structure_id"] = d.selected_structure_id;
  j["decision_step"] = d.decision_step;
  j["statistic"] = d.statistic == SelectionStatistic::Mean ? "mean" : "median";
  j["candidate_errors"] = nlohmann::ordered_json::object();
  for (const auto& [id, e] : d.candidate_errors) j["candidate_errors"][id] = e;
  io::write_file_atomic(path, j.dump(2) + "\n");
}

AllocationDecision read_decision(const std::filesystem::path& path) {
  try {
    const auto j = nlohmann::json::parse(io::read_file(path));
    AllocationDecision d;
    d.selected_structure_id = j.at("selected_structure_id").get<std::string>();
    d.decision_step = j.at("decision_step").get<std::size_t>();
    d.statistic = j.at("statistic").get<std::string>() == "median" ? SelectionStatistic::Median
                                                                    : SelectionStatistic::Mean;
    for (const auto& [id, e] : j.at("candidate_errors").items()) d.candidate_errors[id] = e.get<double>();
    return d;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, path.string() + ": " + e.what());
  }
}

}  // namespace dprog
