#pragma once

#include <vector>

#include "dprog/harness.hpp"

namespace fixtures {

/// Grid and noiseless curves for the default training population.
struct Table1 {
  dprog::TimeGrid grid;
  std::vector<dprog::DamageCurve> curves;  // blue, orange, green
};

inline const Table1& table1() {
  static const Table1 t = [] {
    const auto cfg = dprog::ExperimentConfig::defaults();
    Table1 out;
    out.grid = dprog::resolve_grid(cfg);
    for (const auto& p : cfg.training)
      out.curves.push_back(dprog::simulate_curve(p.params(), out.grid, cfg.sim_options(), p.id));
    return out;
  }();
  return t;
}

inline dprog::DamageCurve make_curve(std::vector<double> values, const char* id = "c") {
  dprog::DamageCurve c;
  c.structure_id = id;
  c.grid = dprog::make_grid(values.size(), static_cast<double>(values.size() - 1));
  c.values = std::move(values);
  return c;
}

}  // namespace fixtures
