#include <cctype>
#include <cmath>
#include <set>

#include "dprog/error.hpp"
#include "dprog/harness.hpp"
#include "dprog/io.hpp"

namespace dprog {

namespace {

using nlohmann::json;

// Walks a JSON object, recording the pointer path of every lookup so that
// violations can be reported with their location.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) error("", "expected an object");
  }

  [[noreturn]] void error(const std::string& key, const std::string& what) const {
    fail(ErrorKind::Config, (key.empty() ? path_ : path_ + "/" + key) + ": " + what);
  }

  bool has(const std::string& key) const {
    seen_.insert(key);
    return node_.contains(key) && !node_.at(key).is_null();
  }

  const json& raw(const std::string& key) const {
    seen_.insert(key);
    if (!node_.contains(key)) error(key, "missing required key");
    return node_.at(key);
  }

  Reader child(const std::string& key) const { return Reader(raw(key), path_ + "/" + key); }

  double number(const std::string& key) const {
    const auto& v = raw(key);
    if (!v.is_number()) error(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) error(key, "expected a finite number");
    return x;
  }

  double positive(const std::string& key) const {
    const double x = number(key);
    if (!(x > 0.0)) error(key, "must be > 0");
    return x;
  }

  std::uint64_t unsigned_int(const std::string& key, std::uint64_t min = 0) const {
    const auto& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      error(key, "expected a non-negative integer");
    const auto x = v.get<std::uint64_t>();
    if (x < min) error(key, "must be >= " + std::to_string(min));
    return x;
  }

  bool boolean(const std::string& key) const {
    const auto& v = raw(key);
    if (!v.is_boolean()) error(key, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) const {
    const auto& v = raw(key);
    if (!v.is_string()) error(key, "expected a string");
    return v.get<std::string>();
  }

  const json& array(const std::string& key) const {
    const auto& v = raw(key);
    if (!v.is_array()) error(key, "expected an array");
    return v;
  }

  const std::string& path() const { return path_; }

  /// Rejects keys that were never looked up.
  void finish() const {
    for (const auto& [k, _] : node_.items())
      if (!seen_.count(k)) error(k, "unknown key");
  }

 private:
  const json& node_;
  std::string path_;
  mutable std::set<std::string> seen_;
};

NamedParams read_params(const Reader& r) {
  NamedParams p;
  p.id = r.string("id");
  if (p.id.empty()) r.error("id", "must not be empty");
  for (char c : p.id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'))
      r.error("id", "may only contain letters, digits, '-' and '_'");
  p.m_base = r.positive("m_base");
  p.m_multiplier = r.positive("m_multiplier");
  p.C = r.positive("C");
  p.delta_sigma = r.positive("delta_sigma");
  p.a0 = r.positive("a0");
  r.finish();
  return p;
}

std::vector<NamedParams> read_population(const Reader& parent, const std::string& key) {
  const auto& arr = parent.array(key);
  std::vector<NamedParams> out;
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(read_params(Reader(arr[i], parent.path() + "/" + key + "/" + std::to_string(i))));
  return out;
}

nlohmann::ordered_json params_json(const NamedParams& p) {
  return {{"id", p.id},   {"m_base", p.m_base},           {"m_multiplier", p.m_multiplier},
          {"C", p.C},     {"delta_sigma", p.delta_sigma}, {"a0", p.a0}};
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  c.training = {
      {"blue", 2.65, 1.0, 6e-13, 300.0, 3.0},
      {"orange", 2.65, 1.0, 5.58e-13, 300.0, 3.0},
      {"green", 2.65, 1.001, 6.72e-13, 300.0, 3.0},
  };
  c.testing = {
      {"red", 2.65, 0.995, 6.42e-13, 300.0, 3.0},
      {"purple", 2.65, 0.999, 5.1e-13, 300.0, 3.0},
      {"brown", 2.65, 1.0015, 6.12e-13, 300.0, 3.0},
      {"pink", 2.65, 1.005, 6.72e-13, 300.0, 3.0},
  };
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  Reader root(j, "");

  {
    auto g = root.child("grid");
    c.n_points = g.unsigned_int("n_points", 2);
    if (g.has("cycles_max")) c.cycles_max = g.positive("cycles_max");
    auto cal = g.child("calibration");
    c.calibration_id = cal.string("structure");
    c.calibration_length = cal.positive("terminal_length_mm");
    cal.finish();
    c.substeps = g.unsigned_int("substeps", 1);
    c.a_ceiling = g.positive("a_ceiling_mm");
    g.finish();
  }
  {
    auto p = root.child("populations");
    c.training = read_population(p, "training");
    c.testing = read_population(p, "testing");
    auto s = p.child("second");
    c.second.count = s.unsigned_int("count", 2);
    c.second.m_base = s.positive("m_base");
    const auto& mr = s.array("m_multiplier_range");
    const auto& cr = s.array("C_range");
    if (mr.size() != 2 || !mr[0].is_number() || !mr[1].is_number())
      s.error("m_multiplier_range", "expected [lo, hi]");
    if (cr.size() != 2 || !cr[0].is_number() || !cr[1].is_number())
      s.error("C_range", "expected [lo, hi]");
    c.second.m_multiplier_lo = mr[0].get<double>();
    c.second.m_multiplier_hi = mr[1].get<double>();
    c.second.C_lo = cr[0].get<double>();
    c.second.C_hi = cr[1].get<double>();
    if (!(c.second.m_multiplier_lo > 0.0 && c.second.m_multiplier_lo <= c.second.m_multiplier_hi))
      s.error("m_multiplier_range", "need 0 < lo <= hi");
    if (!(c.second.C_lo > 0.0 && c.second.C_lo <= c.second.C_hi))
      s.error("C_range", "need 0 < lo <= hi");
    c.second.delta_sigma = s.positive("delta_sigma");
    c.second.a0 = s.positive("a0");
    s.finish();
    p.finish();
  }
  {
    auto n = root.child("noise");
    c.noise_high = n.positive("high_mm");
    c.noise_low = n.positive("low_mm");
    n.finish();
  }
  {
    auto f = root.child("fpca");
    const bool thr = f.has("variance_threshold");
    const bool fixed = f.has("components");
    if (thr == fixed) f.error("", "set exactly one of variance_threshold or components");
    if (thr) {
      const double t = f.number("variance_threshold");
      if (!(t > 0.0 && t <= 1.0)) f.error("variance_threshold", "must be in (0, 1]");
      c.selection = VarianceThreshold{t};
    } else {
      c.selection = FixedComponents{f.unsigned_int("components", 1)};
    }
    f.finish();
  }
  {
    auto h = root.child("hmc");
    c.hmc.n_samples = h.unsigned_int("n_samples", 1);
    c.hmc.n_warmup = h.unsigned_int("n_warmup");
    c.hmc.step_size = h.positive("step_size");
    c.hmc.n_leapfrog = h.unsigned_int("n_leapfrog", 1);
    c.hmc.adapt_step_size = h.boolean("adapt_step_size");
    c.hmc.target_accept = h.number("target_accept");
    if (!(c.hmc.target_accept > 0.0 && c.hmc.target_accept < 1.0))
      h.error("target_accept", "must be in (0, 1)");
    c.hmc.step_jitter = h.number("step_jitter");
    if (!(c.hmc.step_jitter >= 0.0 && c.hmc.step_jitter < 1.0))
      h.error("step_jitter", "must be in [0, 1)");
    h.finish();
  }
  {
    auto m = root.child("monitor");
    c.checkpoints.clear();
    const auto& cps = m.array("checkpoints");
    for (std::size_t i = 0; i < cps.size(); ++i) {
      if (!cps[i].is_number_unsigned() || cps[i].get<std::size_t>() == 0)
        fail(ErrorKind::Config, m.path() + "/checkpoints/" + std::to_string(i) +
                                    ": expected a positive integer");
      c.checkpoints.push_back(cps[i].get<std::size_t>());
    }
    c.decision_step = m.unsigned_int("decision_step", 1);
    const auto stat = m.string("statistic");
    if (stat == "mean") c.statistic = SelectionStatistic::Mean;
    else if (stat == "median") c.statistic = SelectionStatistic::Median;
    else m.error("statistic", "expected \"mean\" or \"median\"");
    if (m.has("force_candidate")) c.force_candidate = m.string("force_candidate");
    m.finish();
  }
  {
    auto e = root.child("evaluation");
    c.density_points = e.unsigned_int("density_points", 2);
    e.finish();
  }
  c.seed = root.unsigned_int("seed");
  c.output_dir = root.string("output_dir");
  root.finish();
  c.validate();
  return c;
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  auto& g = j["grid"];
  g["n_points"] = n_points;
  g["cycles_max"] = cycles_max ? nlohmann::ordered_json(*cycles_max) : nlohmann::ordered_json();
  g["calibration"] = {{"structure", calibration_id}, {"terminal_length_mm", calibration_length}};
  g["substeps"] = substeps;
  g["a_ceiling_mm"] = a_ceiling;

  auto& p = j["populations"];
  p["training"] = nlohmann::ordered_json::array();
  for (const auto& t : training) p["training"].push_back(params_json(t));
  p["testing"] = nlohmann::ordered_json::array();
  for (const auto& t : testing) p["testing"].push_back(params_json(t));
  p["second"] = {{"count", second.count},
                 {"m_base", second.m_base},
                 {"m_multiplier_range", {second.m_multiplier_lo, second.m_multiplier_hi}},
                 {"C_range", {second.C_lo, second.C_hi}},
                 {"delta_sigma", second.delta_sigma},
                 {"a0", second.a0}};

  j["noise"] = {{"high_mm", noise_high}, {"low_mm", noise_low}};
  if (const auto* t = std::get_if<VarianceThreshold>(&selection))
    j["fpca"] = {{"variance_threshold", t->fraction}};
  else
    j["fpca"] = {{"components", std::get<FixedComponents>(selection).k}};
  j["hmc"] = {{"n_samples", hmc.n_samples},         {"n_warmup", hmc.n_warmup},
              {"step_size", hmc.step_size},         {"n_leapfrog", hmc.n_leapfrog},
              {"adapt_step_size", hmc.adapt_step_size}, {"target_accept", hmc.target_accept},
              {"step_jitter", hmc.step_jitter}};
  j["monitor"] = {{"checkpoints", checkpoints},
                  {"decision_step", decision_step},
                  {"statistic", statistic == SelectionStatistic::Mean ? "mean" : "median"},
                  {"force_candidate", force_candidate ? nlohmann::ordered_json(*force_candidate)
                                                      : nlohmann::ordered_json()}};
  j["evaluation"] = {{"density_points", density_points}};
  j["seed"] = seed;
  j["output_dir"] = output_dir.string();
  return j;
}

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& where, const std::string& what) {
    fail(ErrorKind::Config, where + ": " + what);
  };
  if (n_points < 2) bad("/grid/n_points", "must be >= 2");
  if (training.size() < 2) bad("/populations/training", "need at least 2 structures");
  if (testing.empty()) bad("/populations/testing", "need at least 1 structure");
  std::set<std::string> ids;
  for (const auto* pop : {&training, &testing})
    for (const auto& p : *pop) {
      if (!ids.insert(p.id).second) bad("/populations", "duplicate structure id '" + p.id + "'");
      p.params().validate();
    }
  if (!cycles_max) {
    bool found = false;
    for (const auto& p : training) found = found || p.id == calibration_id;
    if (!found) bad("/grid/calibration/structure", "'" + calibration_id + "' is not a training structure");
  }
  if (checkpoints.empty()) bad("/monitor/checkpoints", "must not be empty");
  for (auto M : checkpoints)
    if (M < 1 || M > n_points) bad("/monitor/checkpoints", "values must lie in [1, n_points]");
  if (decision_step < 1 || decision_step >= n_points)
    bad("/monitor/decision_step", "must lie in [1, n_points)");
  if (force_candidate) {
    bool found = false;
    for (const auto& p : testing) found = found || p.id == *force_candidate;
    if (!found) bad("/monitor/force_candidate", "'" + *force_candidate + "' is not a testing structure");
  }
  if (const auto* k = std::get_if<FixedComponents>(&selection); k && (k->k < 1 || k->k > n_points))
    bad("/fpca/components", "must lie in [1, n_points]");
  if (second.count < 2) bad("/populations/second/count", "must be >= 2");
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path), nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::Config, path.string() + ": " + e.what());
  }
  return ExperimentConfig::from_json(j);
}

}  // namespace dprog
