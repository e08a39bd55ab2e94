#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dprog/active_learner.hpp"
#include "dprog/evaluation.hpp"
#include "dprog/inference.hpp"
#include "dprog/paris_sim.hpp"

namespace dprog {

struct NamedParams {
  std::string id;
  double m_base = 2.65;
  double m_multiplier = 1.0;
  double C = 0.0;
  double delta_sigma = 300.0;
  double a0 = 3.0;

  ParisParams params() const { return {m_base * m_multiplier, C, delta_sigma, a0}; }
};

struct SecondPopulationConfig {
  std::size_t count = 8;
  double m_base = 2.65;
  double m_multiplier_lo = 0.995;
  double m_multiplier_hi = 1.005;
  double C_lo = 5.1e-13;
  double C_hi = 6.72e-13;
  double delta_sigma = 300.0;
  double a0 = 3.0;
};

struct ExperimentConfig {
  // Grid
  std::size_t n_points = 100;
  /// Cycle extent; when absent it is calibrated so that `calibration_id`
  /// ends at `calibration_length` mm.
  std::optional<double> cycles_max;
  std::string calibration_id = "green";
  double calibration_length = 20.0;
  std::size_t substeps = 64;
  double a_ceiling = 1000.0;

  std::vector<NamedParams> training;
  std::vector<NamedParams> testing;
  SecondPopulationConfig second;

  double noise_high = 0.05;
  double noise_low = 0.5;

  ComponentSelection selection = VarianceThreshold{0.95};
  HmcConfig hmc;

  std::vector<std::size_t> checkpoints{10, 20, 30, 40, 50, 60, 70, 80};
  std::size_t decision_step = 40;
  SelectionStatistic statistic = SelectionStatistic::Mean;
  std::optional<std::string> force_candidate;

  std::uint64_t seed = 20240917;
  std::filesystem::path output_dir = "dprog-out";
  std::size_t density_points = 256;

  static ExperimentConfig defaults();
  /// Throws Config with a JSON-pointer location for the first violation.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  void validate() const;

  SimulationOptions sim_options() const { return {substeps, a_ceiling}; }
};

ExperimentConfig load_config(const std::filesystem::path& path);

/// Curves of one population, in configuration order.
struct Population {
  std::vector<DamageCurve> truth;
  std::vector<DamageCurve> high;
  std::vector<DamageCurve> low;
};

struct SimulatedData {
  TimeGrid grid;
  Population training;
  Population testing;
  Population second;
  std::vector<NamedParams> second_params;
};

/// Everything simulate produces, computed in memory.
SimulatedData simulate_all(const ExperimentConfig& cfg);
TimeGrid resolve_grid(const ExperimentConfig& cfg);

struct MonitorResult {
  std::map<std::size_t, std::vector<ErrorRecord>> records;  // by M
  AllocationDecision decision;
  /// Posterior point predictions at the decision step, by structure id.
  std::map<std::string, std::vector<double>> interpolated;
};

MonitorResult run_monitor(const ExperimentConfig& cfg, const PrognosisModel& model,
                          std::span<const DamageCurve> testing_low);

struct VariantResult {
  std::string tag;
  PrognosisModel model;
  std::vector<TerminalErrorSet> errors;  // one per (structure, M)
};

struct EvaluationResult {
  std::string informed_candidate;
  std::vector<VariantResult> variants;  // "not-updated" first
  /// Pooled per-draw errors of the random-selection baseline, by M.
  std::map<std::size_t, WeightedSample> baseline;
  std::map<std::string, DamageCurve> spliced;
};

EvaluationResult run_update_evaluate(const ExperimentConfig& cfg, const PrognosisModel& base,
                                     const SimulatedData& data,
                                     const std::map<std::string, std::vector<double>>& interpolated,
                                     const std::string& informed_candidate);

/// Mean weighted terminal error of a variant over all structures and the
/// given observation counts (each draw equally weighted).
double variant_mean_error(const VariantResult& v, std::size_t min_M);
double baseline_mean_error(const EvaluationResult& r, std::size_t min_M);

// Command entry points. Each reads only files written by earlier commands
// under cfg.output_dir and writes its own files atomically.
void cmd_simulate(const ExperimentConfig& cfg);
void cmd_fit(const ExperimentConfig& cfg);
void cmd_monitor(const ExperimentConfig& cfg);
void cmd_update_evaluate(const ExperimentConfig& cfg);
/// Runs all four commands and writes report.json; returns the report.
nlohmann::ordered_json cmd_reproduce_paper(const ExperimentConfig& cfg);

void write_model(const PrognosisModel& m, const std::filesystem::path& path);
PrognosisModel read_model(const std::filesystem::path& path);

}  // namespace dprog
