#include "dprog/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "dprog/criteria.hpp"
#include "dprog/error.hpp"
#include "dprog/io.hpp"
#include "dprog/seeding.hpp"

namespace dprog {

namespace fs = std::filesystem;

namespace {

std::string padded(std::size_t v, int width = 3) {
  std::string s = std::to_string(v);
  return std::string(s.size() < static_cast<std::size_t>(width) ? width - s.size() : 0, '0') + s;
}

fs::path curve_path(const fs::path& out, const std::string& population, const std::string& id,
                    Fidelity f) {
  return out / "curves" / population / (id + "_" + to_string(f) + ".csv");
}

std::vector<DamageCurve> read_population(const fs::path& out, const std::string& population,
                                         const std::vector<std::string>& ids, Fidelity f) {
  std::vector<DamageCurve> curves;
  for (const auto& id : ids) {
    auto c = read_curve(curve_path(out, population, id, f));
    require(c.fidelity == f && c.structure_id == id, ErrorKind::Io,
            "curve metadata mismatch for " + id);
    curves.push_back(std::move(c));
  }
  return curves;
}

std::vector<std::string> ids_of(const std::vector<NamedParams>& pop) {
  std::vector<std::string> ids;
  for (const auto& p : pop) ids.push_back(p.id);
  return ids;
}

std::vector<std::string> second_ids(const ExperimentConfig& cfg) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < cfg.second.count; ++i) ids.push_back("s" + padded(i + 1, 2));
  return ids;
}

Population simulate_population(const ExperimentConfig& cfg, const TimeGrid& grid,
                               const std::vector<NamedParams>& params) {
  Population pop;
  for (const auto& p : params) {
    auto truth = simulate_curve(p.params(), grid, cfg.sim_options(), p.id);
    pop.high.push_back(
        degrade(truth, cfg.noise_high, derive_seed(cfg.seed, "sim/" + p.id + "/high"), Fidelity::High));
    pop.low.push_back(
        degrade(truth, cfg.noise_low, derive_seed(cfg.seed, "sim/" + p.id + "/low"), Fidelity::Low));
    pop.truth.push_back(std::move(truth));
  }
  return pop;
}

HmcConfig hmc_for(const ExperimentConfig& cfg, const std::string& label) {
  HmcConfig h = cfg.hmc;
  h.seed = derive_seed(cfg.seed, label);
  return h;
}

}  // namespace

TimeGrid resolve_grid(const ExperimentConfig& cfg) {
  if (cfg.cycles_max) return make_grid(cfg.n_points, *cfg.cycles_max);
  auto it = std::find_if(cfg.training.begin(), cfg.training.end(),
                         [&](const NamedParams& p) { return p.id == cfg.calibration_id; });
  require(it != cfg.training.end(), ErrorKind::Config,
          "calibration structure '" + cfg.calibration_id + "' not found");
  const double extent = calibrate_cycle_extent(it->params(), cfg.calibration_length, cfg.n_points,
                                               cfg.sim_options());
  return make_grid(cfg.n_points, extent);
}

std::vector<NamedParams> sample_second_population(const ExperimentConfig& cfg) {
  std::vector<NamedParams> out;
  const auto ids = second_ids(cfg);
  for (const auto& id : ids) {
    Rng rng(derive_seed(cfg.seed, "second/" + id + "/params"));
    std::uniform_real_distribution<double> um(cfg.second.m_multiplier_lo, cfg.second.m_multiplier_hi);
    std::uniform_real_distribution<double> uc(cfg.second.C_lo, cfg.second.C_hi);
    NamedParams p;
    p.id = id;
    p.m_base = cfg.second.m_base;
    p.m_multiplier = um(rng);
    p.C = uc(rng);
    p.delta_sigma = cfg.second.delta_sigma;
    p.a0 = cfg.second.a0;
    out.push_back(p);
  }
  return out;
}

SimulatedData simulate_all(const ExperimentConfig& cfg) {
  cfg.validate();
  SimulatedData d;
  d.grid = resolve_grid(cfg);
  d.training = simulate_population(cfg, d.grid, cfg.training);
  d.testing = simulate_population(cfg, d.grid, cfg.testing);
  d.second_params = sample_second_population(cfg);
  d.second = simulate_population(cfg, d.grid, d.second_params);
  return d;
}

MonitorResult run_monitor(const ExperimentConfig& cfg, const PrognosisModel& model,
                          std::span<const DamageCurve> testing_low) {
  MonitorResult r;
  auto schedule = cfg.checkpoints;
  if (std::find(schedule.begin(), schedule.end(), cfg.decision_step) == schedule.end())
    schedule.push_back(cfg.decision_step);
  std::sort(schedule.begin(), schedule.end());

  for (std::size_t M : schedule) {
    auto& recs = r.records[M];
    for (const auto& curve : testing_low) {
      const auto obs = observe_prefix(curve, M, cfg.noise_low);
      const auto samples = hmc_sample(model.fpca, model.prior, obs,
                                      hmc_for(cfg, "hmc/" + curve.structure_id + "/M" + std::to_string(M)));
      recs.push_back(error_record(samples, model.fpca, obs));
      if (M == cfg.decision_step)
        r.interpolated[curve.structure_id] = posterior_point_prediction(samples, model.fpca);
    }
  }
  r.decision = select_structure(r.records.at(cfg.decision_step), cfg.statistic);
  return r;
}

EvaluationResult run_update_evaluate(const ExperimentConfig& cfg, const PrognosisModel& base,
                                     const SimulatedData& data,
                                     const std::map<std::string, std::vector<double>>& interpolated,
                                     const std::string& informed_candidate) {
  EvaluationResult r;
  r.informed_candidate = informed_candidate;

  r.variants.push_back({"not-updated", base, {}});
  for (const auto& tail : data.testing.high) {
    const auto& prefix = interpolated.at(tail.structure_id);
    auto spliced = splice_curve(prefix, tail, cfg.decision_step);
    r.variants.push_back({"updated-with-" + tail.structure_id,
                          update_model(data.training.high, spliced, cfg.selection),
                          {}});
    r.spliced.emplace(tail.structure_id, std::move(spliced));
  }

  const auto stats = population_stats(data.second.truth);
  for (auto& v : r.variants) {
    for (std::size_t M : cfg.checkpoints) {
      for (std::size_t i = 0; i < data.second.low.size(); ++i) {
        const auto& low = data.second.low[i];
        const auto obs = observe_prefix(low, M, cfg.noise_low);
        const auto samples =
            hmc_sample(v.model.fpca, v.model.prior, obs,
                       hmc_for(cfg, "hmc/" + v.tag + "/" + low.structure_id + "/M" + std::to_string(M)));
        v.errors.push_back(terminal_error_set(samples, v.model.fpca, data.second.truth[i], stats, v.tag, M));
      }
    }
  }

  for (std::size_t M : cfg.checkpoints) {
    std::vector<std::vector<double>> sets;
    for (const auto& v : r.variants) {
      if (v.tag == "not-updated") continue;
      std::vector<double> pooled;
      for (const auto& e : v.errors)
        if (e.M == M)
          pooled.insert(pooled.end(), e.per_draw_weighted_errors.begin(), e.per_draw_weighted_errors.end());
      sets.push_back(std::move(pooled));
    }
    r.baseline[M] = random_baseline(sets);
  }
  return r;
}

double variant_mean_error(const VariantResult& v, std::size_t min_M) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& e : v.errors) {
    if (e.M < min_M) continue;
    for (double x : e.per_draw_weighted_errors) sum += x;
    n += e.per_draw_weighted_errors.size();
  }
  require(n > 0, ErrorKind::InvalidArgument, "no errors at the requested observation counts");
  return sum / static_cast<double>(n);
}

double baseline_mean_error(const EvaluationResult& r, std::size_t min_M) {
  // Each checkpoint carries equal weight, matching variant_mean_error when
  // all structures have the same number of draws.
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [M, sample] : r.baseline) {
    if (M < min_M) continue;
    sum += sample.mean();
    ++n;
  }
  require(n > 0, ErrorKind::InvalidArgument, "no baseline at the requested observation counts");
  return sum / static_cast<double>(n);
}

void write_model(const PrognosisModel& m, const fs::path& path) {
  nlohmann::json j;
  j["fpca"] = m.fpca;
  j["prior"] = m.prior;
  j["training_ids"] = m.training_ids;
  j["training_scores"] = m.training_scores;
  io::write_file_atomic(path, j.dump(2) + "\n");
}

PrognosisModel read_model(const fs::path& path) {
  try {
    const auto j = nlohmann::json::parse(io::read_file(path));
    PrognosisModel m;
    m.fpca = j.at("fpca").get<FpcaModel>();
    m.prior = j.at("prior").get<GaussianPrior>();
    m.training_ids = j.at("training_ids").get<std::vector<std::string>>();
    m.training_scores = j.at("training_scores").get<std::vector<ScoreVector>>();
    require(m.prior.size() == m.fpca.components(), ErrorKind::Io,
            "prior and basis disagree on the component count");
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Commands

namespace {

void write_population(const fs::path& out, const std::string& name, const Population& pop) {
  for (const auto* curves : {&pop.truth, &pop.high, &pop.low})
    for (const auto& c : *curves) write_curve(c, curve_path(out, name, c.structure_id, c.fidelity));
}

void write_params(const fs::path& path, const std::vector<NamedParams>& params) {
  io::CsvTable t;
  t.header = {"structure_id", "m", "C", "delta_sigma", "a0"};
  for (const auto& p : params) {
    const auto pp = p.params();
    t.rows.push_back({p.id, io::format_double(pp.m), io::format_double(pp.C),
                      io::format_double(pp.delta_sigma), io::format_double(pp.a0)});
  }
  io::write_file_atomic(path, t.to_string());
}

SimulatedData read_simulated(const ExperimentConfig& cfg) {
  const auto& out = cfg.output_dir;
  SimulatedData d;
  auto load = [&](const std::string& name, const std::vector<std::string>& ids, Population& pop) {
    pop.truth = read_population(out, name, ids, Fidelity::Truth);
    pop.high = read_population(out, name, ids, Fidelity::High);
    pop.low = read_population(out, name, ids, Fidelity::Low);
  };
  load("training", ids_of(cfg.training), d.training);
  load("testing", ids_of(cfg.testing), d.testing);
  load("second", second_ids(cfg), d.second);
  d.grid = d.training.truth.front().grid;
  return d;
}

void write_interpolated(const fs::path& path, const TimeGrid& grid,
                        const std::map<std::string, std::vector<double>>& interp) {
  io::CsvTable t;
  t.header = {"structure_id", "index", "cycle", "value"};
  for (const auto& [id, v] : interp)
    for (std::size_t j = 0; j < v.size(); ++j)
      t.rows.push_back({id, std::to_string(j), io::format_double(grid.cycles[j]), io::format_double(v[j])});
  io::write_file_atomic(path, t.to_string());
}

std::map<std::string, std::vector<double>> read_interpolated(const fs::path& path) {
  const auto t = io::CsvTable::parse(io::read_file(path));
  const auto ci = t.column("structure_id"), vi = t.column("value");
  std::map<std::string, std::vector<double>> out;
  for (const auto& row : t.rows) out[row[ci]].push_back(io::parse_double(row[vi]));
  return out;
}

fs::path model_path(const ExperimentConfig& cfg) { return cfg.output_dir / "model" / "model.json"; }

void write_monitor(const ExperimentConfig& cfg, const MonitorResult& r, const TimeGrid& grid) {
  const auto dir = cfg.output_dir / "monitor";
  io::CsvTable summary;
  summary.header = {"structure_id", "M", "mean_error", "median_error"};
  for (const auto& [M, recs] : r.records) {
    write_error_records(recs, dir / ("errors_M" + padded(M) + ".csv"));
    for (const auto& rec : recs)
      summary.rows.push_back({rec.structure_id, std::to_string(M), io::format_double(rec.mean_error),
                              io::format_double(rec.median_error())});
  }
  io::write_file_atomic(dir / "error_summary.csv", summary.to_string());
  write_decision(r.decision, dir / "decision.json");
  write_interpolated(dir / ("interpolated_M" + padded(cfg.decision_step) + ".csv"), grid, r.interpolated);
}

void write_evaluation(const ExperimentConfig& cfg, const EvaluationResult& r) {
  const auto dir = cfg.output_dir / "evaluation";
  for (const auto& [id, c] : r.spliced) write_curve(c, dir / "spliced" / (id + "_spliced.csv"));

  io::CsvTable errors;
  errors.header = {"model_tag", "structure_id", "M", "draw", "error"};
  io::CsvTable summary;
  summary.header = {"model_tag", "M", "mean_error", "median_error", "mean_point_error"};
  io::CsvTable dens;
  dens.header = {"model_tag", "M", "x", "density"};
  io::CsvTable priors;
  priors.header = {"model_tag", "component", "mu", "sigma"};
  io::CsvTable scores;
  scores.header = {"model_tag", "structure_id", "score_1"};

  auto add_density = [&](const std::string& tag, std::size_t M, const WeightedSample& s) {
    const auto g = kernel_density(s, cfg.density_points);
    for (std::size_t k = 0; k < g.x.size(); ++k)
      dens.rows.push_back({tag, std::to_string(M), io::format_double(g.x[k]), io::format_double(g.density[k])});
  };

  for (const auto& v : r.variants) {
    write_model(v.model, dir / "models" / (v.tag + ".json"));
    for (std::size_t k = 0; k < v.model.prior.size(); ++k)
      priors.rows.push_back({v.tag, std::to_string(k + 1), io::format_double(v.model.prior.mu[k]),
                             io::format_double(v.model.prior.sigma[k])});
    for (std::size_t i = 0; i < v.model.training_ids.size(); ++i)
      scores.rows.push_back({v.tag, v.model.training_ids[i], io::format_double(v.model.training_scores[i][0])});
    for (const auto& e : v.errors) append_error_rows(errors.rows, e);
    for (std::size_t M : cfg.checkpoints) {
      std::vector<double> pooled;
      double point = 0.0;
      std::size_t n_sets = 0;
      for (const auto& e : v.errors) {
        if (e.M != M) continue;
        pooled.insert(pooled.end(), e.per_draw_weighted_errors.begin(), e.per_draw_weighted_errors.end());
        point += e.point_estimate_error;
        ++n_sets;
      }
      TerminalErrorSet all;
      all.per_draw_weighted_errors = pooled;
      summary.rows.push_back({v.tag, std::to_string(M), io::format_double(all.mean()),
                              io::format_double(all.median()),
                              io::format_double(point / static_cast<double>(n_sets))});
      add_density(v.tag, M, unweighted(std::move(pooled)));
    }
  }
  for (const auto& [M, s] : r.baseline) {
    summary.rows.push_back({"random-baseline", std::to_string(M), io::format_double(s.mean()), "", ""});
    add_density("random-baseline", M, s);
  }

  io::write_file_atomic(dir / "terminal_errors.csv", errors.to_string());
  io::write_file_atomic(dir / "summary.csv", summary.to_string());
  io::write_file_atomic(dir / "densities.csv", dens.to_string());
  io::write_file_atomic(dir / "priors.csv", priors.to_string());
  io::write_file_atomic(dir / "scores.csv", scores.to_string());

  nlohmann::ordered_json meta;
  meta["informed_candidate"] = r.informed_candidate;
  meta["decision_step"] = cfg.decision_step;
  meta["variants"] = nlohmann::ordered_json::array();
  for (const auto& v : r.variants) meta["variants"].push_back(v.tag);
  io::write_file_atomic(dir / "evaluation.json", meta.dump(2) + "\n");
}

}  // namespace

void cmd_simulate(const ExperimentConfig& cfg) {
  const auto data = simulate_all(cfg);
  const auto& out = cfg.output_dir;
  write_population(out, "training", data.training);
  write_population(out, "testing", data.testing);
  write_population(out, "second", data.second);
  write_params(out / "curves" / "second" / "params.csv", data.second_params);

  auto resolved = cfg;
  resolved.cycles_max = data.grid.max_cycles();
  io::write_file_atomic(out / "config.resolved.json", resolved.to_json().dump(2) + "\n");
}

void cmd_fit(const ExperimentConfig& cfg) {
  const auto training = read_population(cfg.output_dir, "training", ids_of(cfg.training), Fidelity::High);
  write_model(build_prognosis_model(training, cfg.selection), model_path(cfg));
}

namespace {

MonitorResult monitor_and_write(const ExperimentConfig& cfg) {
  const auto model = read_model(model_path(cfg));
  const auto low = read_population(cfg.output_dir, "testing", ids_of(cfg.testing), Fidelity::Low);
  auto r = run_monitor(cfg, model, low);
  write_monitor(cfg, r, model.fpca.grid);
  return r;
}

EvaluationResult update_evaluate_and_write(const ExperimentConfig& cfg) {
  const auto model = read_model(model_path(cfg));
  const auto data = read_simulated(cfg);
  const auto mon = cfg.output_dir / "monitor";
  const auto interp = read_interpolated(mon / ("interpolated_M" + padded(cfg.decision_step) + ".csv"));
  std::string candidate;
  if (cfg.force_candidate) {
    candidate = *cfg.force_candidate;
  } else {
    const auto d = read_decision(mon / "decision.json");
    require(d.decision_step == cfg.decision_step, ErrorKind::Config,
            "decision.json was made at step " + std::to_string(d.decision_step) +
                ", configuration asks for " + std::to_string(cfg.decision_step));
    candidate = d.selected_structure_id;
  }
  auto r = run_update_evaluate(cfg, model, data, interp, candidate);
  write_evaluation(cfg, r);
  return r;
}

}  // namespace

void cmd_monitor(const ExperimentConfig& cfg) { monitor_and_write(cfg); }

void cmd_update_evaluate(const ExperimentConfig& cfg) { update_evaluate_and_write(cfg); }

nlohmann::ordered_json cmd_reproduce_paper(const ExperimentConfig& cfg) {
  cmd_simulate(cfg);
  cmd_fit(cfg);
  const auto mon = monitor_and_write(cfg);
  const auto eval = update_evaluate_and_write(cfg);
  const auto data = read_simulated(cfg);
  const auto& candidate = eval.informed_candidate;

  using criteria::Outcome;
  std::vector<Outcome> outcomes;
  outcomes.push_back(criteria::variance_concentration(data.training.truth));
  outcomes.push_back(criteria::score_growth_ordering(data.training.truth, cfg.selection));
  outcomes.push_back({3, "conjugate-oracle", false, "run the acceptance suite", false});
  outcomes.push_back({4, "gradient-finite-difference", false, "run the acceptance suite", false});

  auto has = [&](const std::vector<std::string>& ids) {
    for (const auto& id : ids)
      if (!mon.decision.candidate_errors.count(id)) return false;
    return true;
  };
  if (has({"pink", "purple", "red", "brown"})) {
    const bool a = criteria::outliers_exceed_inliers(mon.decision, {"pink", "purple"}, {"red", "brown"});
    const bool b = mon.decision.selected_structure_id == "pink";
    outcomes.push_back({5, "outlier-identification (this seed)", a && b,
                        std::string("outliers-exceed-inliers=") + (a ? "yes" : "no") +
                            " selected=" + mon.decision.selected_structure_id});
  } else {
    outcomes.push_back({5, "outlier-identification (this seed)", false, "default testing ids absent"});
  }
  if (mon.records.count(10) && mon.records.count(80)) {
    std::string detail;
    const bool ok = criteria::errors_decay(mon, 10, 80, &detail);
    outcomes.push_back({6, "error-decay (this seed)", ok, detail});
  } else {
    outcomes.push_back({6, "error-decay (this seed)", false, "checkpoints 10 and 80 not scheduled"});
  }
  if (mon.decision.candidate_errors.count("pink")) {
    std::string detail;
    const bool ok = criteria::informed_beats_baseline(eval, "pink", 40, &detail);
    outcomes.push_back({7, "informed-vs-random (this seed)", ok, detail});
    outcomes.push_back(criteria::prior_shift(eval, "pink"));
  }
  outcomes.push_back(criteria::duplicate_update_stability(data.training.high, cfg.selection));
  outcomes.push_back({10, "determinism", false, "needs two runs; run the acceptance suite", false});

  nlohmann::ordered_json report;
  report["schema"] = "dprog-report-v1";
  report["seed"] = cfg.seed;
  report["cycles_max"] = data.grid.max_cycles();
  report["selected_structure"] = mon.decision.selected_structure_id;
  report["informed_candidate"] = candidate;
  report["criteria"] = nlohmann::ordered_json::array();
  for (const auto& o : outcomes) report["criteria"].push_back(criteria::to_json(o));
  io::write_file_atomic(cfg.output_dir / "report.json", report.dump(2) + "\n");
  return report;
}

}  // namespace dprog
