#include "dprog/paris_sim.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "dprog/error.hpp"
#include "dprog/io.hpp"
#include "dprog/seeding.hpp"

namespace dprog {

void ParisParams::validate() const {
  auto positive = [](double v, const char* name) {
    require(std::isfinite(v) && v > 0.0, ErrorKind::InvalidArgument,
            std::string("Paris parameter ") + name + " must be positive");
  };
  positive(m, "m");
  positive(C, "C");
  positive(delta_sigma, "delta_sigma");
  positive(a0, "a0");
}

double paris_rate(const ParisParams& p, double a) {
  const double dk = p.delta_sigma * std::sqrt(std::numbers::pi * a);
  return p.C * std::pow(dk, p.m);
}

void TimeGrid::validate() const {
  require(cycles.size() >= 2, ErrorKind::InvalidArgument, "time grid needs at least 2 points");
  const double h = cycles[1] - cycles[0];
  require(h > 0.0, ErrorKind::InvalidArgument, "time grid is not strictly increasing");
  for (std::size_t i = 1; i < cycles.size(); ++i) {
    const double d = cycles[i] - cycles[i - 1];
    require(d > 0.0, ErrorKind::InvalidArgument, "time grid is not strictly increasing");
    require(std::abs(d - h) <= 1e-9 * h, ErrorKind::InvalidArgument,
            "time grid is not equidistant at index " + std::to_string(i));
  }
}

const char* to_string(Fidelity f) {
  switch (f) {
    case Fidelity::Truth: return "truth";
    case Fidelity::High: return "high";
    case Fidelity::Low: return "low";
  }
  return "?";
}

Fidelity fidelity_from_string(const std::string& s) {
  if (s == "truth") return Fidelity::Truth;
  if (s == "high") return Fidelity::High;
  if (s == "low") return Fidelity::Low;
  fail(ErrorKind::InvalidArgument, "unknown fidelity '" + s + "'");
}

TimeGrid make_grid(std::size_t n_points, double n_cycles_max) {
  require(n_points >= 2, ErrorKind::InvalidArgument, "make_grid: n_points must be >= 2");
  require(std::isfinite(n_cycles_max) && n_cycles_max > 0.0, ErrorKind::InvalidArgument,
          "make_grid: n_cycles_max must be positive");
  TimeGrid g;
  g.cycles.resize(n_points);
  const double denom = static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i)
    g.cycles[i] = n_cycles_max * static_cast<double>(i) / denom;
  return g;
}

DamageCurve simulate_curve(const ParisParams& params, const TimeGrid& grid,
                           const SimulationOptions& opts, const std::string& structure_id) {
  params.validate();
  grid.validate();
  require(opts.substeps >= 1, ErrorKind::InvalidArgument, "substeps must be >= 1");

  DamageCurve out;
  out.structure_id = structure_id;
  out.grid = grid;
  out.fidelity = Fidelity::Truth;
  out.values.resize(grid.size());
  out.values[0] = params.a0;

  auto f = [&](double a) { return paris_rate(params, a); };
  double a = params.a0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double h = (grid.cycles[i] - grid.cycles[i - 1]) / static_cast<double>(opts.substeps);
    for (std::size_t s = 0; s < opts.substeps; ++s) {
      const double k1 = f(a);
      const double k2 = f(a + 0.5 * h * k1);
      const double k3 = f(a + 0.5 * h * k2);
      const double k4 = f(a + h * k3);
      a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!std::isfinite(a) || a > opts.a_ceiling)
        fail(ErrorKind::Numerical, "crack length exceeded ceiling of " +
                                       io::format_double(opts.a_ceiling) +
                                       " mm at grid index " + std::to_string(i));
    }
    out.values[i] = a;
  }
  return out;
}

DamageCurve degrade(const DamageCurve& truth, double noise_std, std::uint64_t seed,
                    Fidelity fidelity) {
  require(truth.fidelity == Fidelity::Truth, ErrorKind::InvalidArgument,
          "degrade expects a Truth curve");
  require(fidelity != Fidelity::Truth, ErrorKind::InvalidArgument,
          "degrade must produce a High or Low fidelity curve");
  require(std::isfinite(noise_std) && noise_std >= 0.0, ErrorKind::InvalidArgument,
          "noise_std must be non-negative");
  DamageCurve out = truth;
  out.fidelity = fidelity;
  if (noise_std == 0.0) return out;
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, noise_std);
  for (double& v : out.values) v += noise(rng);
  return out;
}

double calibrate_cycle_extent(const ParisParams& params, double target_length,
                              std::size_t n_points, const SimulationOptions& opts) {
  params.validate();
  require(target_length > params.a0, ErrorKind::InvalidArgument,
          "target crack length must exceed a0");
  require(target_length < opts.a_ceiling, ErrorKind::InvalidArgument,
          "target crack length must be below the ceiling");

  // Terminal length is monotone in the extent; blow-up counts as overshoot.
  auto overshoots = [&](double extent) {
    try {
      return simulate_curve(params, make_grid(n_points, extent), opts).values.back() >=
             target_length;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Numerical) return true;
      throw;
    }
  };

  double lo = 0.0;
  double hi = 1.0;
  while (!overshoots(hi)) {
    lo = hi;
    hi *= 2.0;
    require(hi < 1e300, ErrorKind::Numerical, "calibration failed to bracket target");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (overshoots(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

}  // namespace

void write_curve(const DamageCurve& curve, const std::filesystem::path& csv_path) {
  require(curve.values.size() == curve.grid.size(), ErrorKind::DimensionMismatch,
          "curve values and grid differ in length");
  io::CsvTable t;
  t.header = {"cycle", "value"};
  for (std::size_t i = 0; i < curve.values.size(); ++i)
    t.rows.push_back({io::format_double(curve.grid.cycles[i]), io::format_double(curve.values[i])});
  io::write_file_atomic(csv_path, t.to_string());

  nlohmann::ordered_json meta;
  meta["structure_id"] = curve.structure_id;
  meta["fidelity"] = to_string(curve.fidelity);
  meta["n_points"] = curve.values.size();
  if (curve.splice_index) meta["splice_index"] = *curve.splice_index;
  io::write_file_atomic(sidecar_path(csv_path), meta.dump(2) + "\n");
}

DamageCurve read_curve(const std::filesystem::path& csv_path) {
  auto t = io::CsvTable::parse(io::read_file(csv_path));
  const auto ci = t.column("cycle");
  const auto vi = t.column("value");
  DamageCurve c;
  for (const auto& row : t.rows) {
    c.grid.cycles.push_back(io::parse_double(row[ci]));
    c.values.push_back(io::parse_double(row[vi]));
  }
  c.grid.validate();

  const auto meta_path = sidecar_path(csv_path);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(io::read_file(meta_path));
    c.structure_id = meta.at("structure_id").get<std::string>();
    c.fidelity = fidelity_from_string(meta.at("fidelity").get<std::string>());
    if (meta.contains("splice_index")) c.splice_index = meta["splice_index"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, meta_path.string() + ": " + e.what());
  }
  return c;
}

}  // namespace dprog
