#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dprog {

/// Paris-Erdogan crack-growth parameters.
///   da/dN = C * (delta_sigma * sqrt(pi * a))^m
/// with a in mm, delta_sigma in MPa, so C carries (mm/cycle)(MPa sqrt(mm))^-m.
struct ParisParams {
  double m = 0.0;
  double C = 0.0;
  double delta_sigma = 0.0;
  double a0 = 0.0;

  void validate() const;
};

/// Crack growth rate da/dN at crack length `a` (geometry factor 1).
double paris_rate(const ParisParams& p, double a);

/// Equidistant cycle grid starting at zero.
struct TimeGrid {
  std::vector<double> cycles;

  std::size_t size() const { return cycles.size(); }
  double spacing() const { return cycles.size() < 2 ? 0.0 : cycles[1] - cycles[0]; }
  double max_cycles() const { return cycles.empty() ? 0.0 : cycles.back(); }

  /// Throws unless n >= 2, strictly increasing and equidistant.
  void validate() const;

  bool operator==(const TimeGrid&) const = default;
};

enum class Fidelity { Truth, High, Low };

const char* to_string(Fidelity f);
Fidelity fidelity_from_string(const std::string& s);

struct DamageCurve {
  std::string structure_id;
  TimeGrid grid;
  std::vector<double> values;
  Fidelity fidelity = Fidelity::Truth;
  /// Index of the first grid point taken from a measured high-fidelity tail,
  /// set when the curve was produced by splice_curve.
  std::optional<std::size_t> splice_index;
};

TimeGrid make_grid(std::size_t n_points, double n_cycles_max);

struct SimulationOptions {
  std::size_t substeps = 64;
  double a_ceiling = 1000.0;
};

/// Integrates the Paris law over the grid with classical RK4, `substeps`
/// uniform sub-intervals per grid interval. Throws Numerical if the crack
/// length passes the ceiling; the message carries the offending grid index.
DamageCurve simulate_curve(const ParisParams& params, const TimeGrid& grid,
                           const SimulationOptions& opts = {},
                           const std::string& structure_id = {});

/// Adds iid N(0, noise_std^2) to every grid value of a Truth curve.
DamageCurve degrade(const DamageCurve& truth, double noise_std, std::uint64_t seed,
                    Fidelity fidelity);

/// Finds the cycle extent at which the curve for `params` (sampled on an
/// n_points grid) ends at `target_length`, by bisection.
double calibrate_cycle_extent(const ParisParams& params, double target_length,
                              std::size_t n_points, const SimulationOptions& opts = {});

// CSV persistence: `<stem>.csv` with header `cycle,value` and a `<stem>.json`
// sidecar carrying structure_id, fidelity and splice index.
void write_curve(const DamageCurve& curve, const std::filesystem::path& csv_path);
DamageCurve read_curve(const std::filesystem::path& csv_path);

}  // namespace dprog
