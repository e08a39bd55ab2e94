#include "dprog/dprog.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "dprog/error.hpp"
#include "dprog/harness.hpp"

struct dprog_config {
  dprog::ExperimentConfig cfg;
};

struct dprog_model {
  dprog::PrognosisModel model;
};

namespace {

thread_local std::string last_error;

dprog_status status_of(dprog::ErrorKind k) {
  switch (k) {
    case dprog::ErrorKind::InvalidArgument: return DPROG_ERR_INVALID_ARGUMENT;
    case dprog::ErrorKind::DimensionMismatch: return DPROG_ERR_DIMENSION_MISMATCH;
    case dprog::ErrorKind::Numerical: return DPROG_ERR_NUMERICAL;
    case dprog::ErrorKind::Io: return DPROG_ERR_IO;
    case dprog::ErrorKind::Config: return DPROG_ERR_CONFIG;
  }
  return DPROG_ERR_INTERNAL;
}

template <class F>
dprog_status guarded(F&& f) noexcept {
  try {
    f();
    last_error.clear();
    return DPROG_OK;
  } catch (const dprog::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return DPROG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return DPROG_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return DPROG_ERR_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  if (!p) dprog::fail(dprog::ErrorKind::InvalidArgument, std::string(name) + " is null");
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* dprog_version(void) { return "0.1.0"; }

const char* dprog_status_name(dprog_status status) {
  switch (status) {
    case DPROG_OK: return "ok";
    case DPROG_ERR_INVALID_ARGUMENT: return dprog::to_string(dprog::ErrorKind::InvalidArgument);
    case DPROG_ERR_DIMENSION_MISMATCH: return dprog::to_string(dprog::ErrorKind::DimensionMismatch);
    case DPROG_ERR_NUMERICAL: return dprog::to_string(dprog::ErrorKind::Numerical);
    case DPROG_ERR_IO: return dprog::to_string(dprog::ErrorKind::Io);
    case DPROG_ERR_CONFIG: return dprog::to_string(dprog::ErrorKind::Config);
    case DPROG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* dprog_last_error(void) { return last_error.c_str(); }

void dprog_string_free(char* s) { std::free(s); }

dprog_status dprog_config_defaults(dprog_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new dprog_config{dprog::ExperimentConfig::defaults()};
  });
}

dprog_status dprog_config_load(const char* path, dprog_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new dprog_config{dprog::load_config(path)};
  });
}

void dprog_config_free(dprog_config* cfg) { delete cfg; }

dprog_status dprog_config_set_seed(dprog_config* cfg, uint64_t seed) {
  return guarded([&] {
    need(cfg, "cfg");
    cfg->cfg.seed = seed;
  });
}

dprog_status dprog_config_set_output_dir(dprog_config* cfg, const char* dir) {
  return guarded([&] {
    need(cfg, "cfg");
    need(dir, "dir");
    cfg->cfg.output_dir = dir;
  });
}

dprog_status dprog_config_set_decision_step(dprog_config* cfg, size_t step) {
  return guarded([&] {
    need(cfg, "cfg");
    auto next = cfg->cfg;
    next.decision_step = step;
    next.validate();
    cfg->cfg = std::move(next);
  });
}

dprog_status dprog_config_set_force_candidate(dprog_config* cfg, const char* id) {
  return guarded([&] {
    need(cfg, "cfg");
    auto next = cfg->cfg;
    if (id) next.force_candidate = id;
    else next.force_candidate.reset();
    next.validate();
    cfg->cfg = std::move(next);
  });
}

dprog_status dprog_config_to_json(const dprog_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = duplicate(cfg->cfg.to_json().dump(2) + "\n");
  });
}

dprog_status dprog_simulate(const dprog_config* cfg) {
  return guarded([&] {
    need(cfg, "cfg");
    dprog::cmd_simulate(cfg->cfg);
  });
}

dprog_status dprog_fit(const dprog_config* cfg) {
  return guarded([&] {
    need(cfg, "cfg");
    dprog::cmd_fit(cfg->cfg);
  });
}

dprog_status dprog_monitor(const dprog_config* cfg) {
  return guarded([&] {
    need(cfg, "cfg");
    dprog::cmd_monitor(cfg->cfg);
  });
}

dprog_status dprog_update_evaluate(const dprog_config* cfg) {
  return guarded([&] {
    need(cfg, "cfg");
    dprog::cmd_update_evaluate(cfg->cfg);
  });
}

dprog_status dprog_reproduce_paper(const dprog_config* cfg, char** report_json) {
  return guarded([&] {
    need(cfg, "cfg");
    const auto report = dprog::cmd_reproduce_paper(cfg->cfg);
    if (report_json) *report_json = duplicate(report.dump(2) + "\n");
  });
}

dprog_status dprog_model_load(const char* path, dprog_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new dprog_model{dprog::read_model(path)};
  });
}

void dprog_model_free(dprog_model* model) { delete model; }

dprog_status dprog_model_dims(const dprog_model* model, size_t* n_points, size_t* n_components) {
  return guarded([&] {
    need(model, "model");
    if (n_points) *n_points = model->model.fpca.grid.size();
    if (n_components) *n_components = model->model.fpca.components();
  });
}

dprog_status dprog_model_project(const dprog_model* model, const double* values, size_t n_points,
                                 double* scores, size_t n_components) {
  return guarded([&] {
    need(model, "model");
    need(values, "values");
    need(scores, "scores");
    const auto& m = model->model.fpca;
    dprog::require(n_components == m.components(), dprog::ErrorKind::DimensionMismatch,
                   "expected " + std::to_string(m.components()) + " score slots");
    const auto s = dprog::project(m, std::span<const double>(values, n_points));
    std::copy(s.begin(), s.end(), scores);
  });
}

dprog_status dprog_model_reconstruct(const dprog_model* model, const double* scores,
                                     size_t n_components, double* values, size_t n_points) {
  return guarded([&] {
    need(model, "model");
    need(scores, "scores");
    need(values, "values");
    const auto& m = model->model.fpca;
    dprog::require(n_points == m.grid.size(), dprog::ErrorKind::DimensionMismatch,
                   "expected " + std::to_string(m.grid.size()) + " value slots");
    const auto v = dprog::reconstruct(m, std::span<const double>(scores, n_components));
    std::copy(v.begin(), v.end(), values);
  });
}

}  // extern "C"
