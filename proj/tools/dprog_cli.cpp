// Command-line front end. Everything goes through the C interface so the
// binary exercises the same surface that other languages bind to.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dprog/dprog.h"

namespace {

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> decision_step;
  std::string force_candidate;
  std::string init_path;
};

class CliFailure {
 public:
  explicit CliFailure(dprog_status s) : status(s) {}
  dprog_status status;
};

void check(dprog_status s) {
  if (s != DPROG_OK) throw CliFailure(s);
}

// Owns a config handle and applies the command-line overrides.
class Config {
 public:
  explicit Config(const Options& o) {
    if (o.config_path.empty()) check(dprog_config_defaults(&h_));
    else check(dprog_config_load(o.config_path.c_str(), &h_));
    if (!o.out_dir.empty()) check(dprog_config_set_output_dir(h_, o.out_dir.c_str()));
    if (o.seed) check(dprog_config_set_seed(h_, *o.seed));
    if (o.decision_step) check(dprog_config_set_decision_step(h_, *o.decision_step));
    if (!o.force_candidate.empty())
      check(dprog_config_set_force_candidate(h_, o.force_candidate.c_str()));
  }
  ~Config() { dprog_config_free(h_); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;

  const dprog_config* get() const { return h_; }
  dprog_config* get() { return h_; }

 private:
  dprog_config* h_ = nullptr;
};

std::string take(char* s) {
  std::string out = s ? s : "";
  dprog_string_free(s);
  return out;
}

int config_init(const Options& o) {
  Config cfg(o);
  char* text = nullptr;
  check(dprog_config_to_json(cfg.get(), &text));
  const std::string doc = take(text);
  if (o.init_path.empty() || o.init_path == "-") {
    std::cout << doc;
    return 0;
  }
  std::ofstream f(o.init_path, std::ios::binary);
  if (!(f << doc)) {
    std::cerr << "error [io]: cannot write " << o.init_path << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Population-based damage prognosis with active high-fidelity allocation"};
  app.set_version_flag("--version", std::string(dprog_version()));
  app.require_subcommand(1);

  Options o;
  app.add_option("--config", o.config_path, "JSON configuration file (defaults when omitted)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", o.out_dir, "Output directory (overrides the config)");
  app.add_option("--seed", o.seed, "Master seed (overrides the config)");
  app.add_option("--decision-step", o.decision_step, "Observation count at which to allocate");
  app.add_option("--force-candidate", o.force_candidate,
                 "Update with this structure instead of the selected one");

  auto* simulate = app.add_subcommand("simulate", "Simulate truth, high- and low-fidelity curves");
  auto* fit = app.add_subcommand("fit", "Fit the functional basis and prior on training curves");
  auto* monitor = app.add_subcommand("monitor", "Infer scores on testing curves and allocate");
  auto* update = app.add_subcommand("update-evaluate",
                                    "Update the model and score predictions on a second population");
  auto* reproduce = app.add_subcommand("reproduce-paper", "Run the full pipeline and write a report");
  auto* config = app.add_subcommand("config", "Configuration helpers");
  config->require_subcommand(1);
  auto* init = config->add_subcommand("init", "Write the default configuration");
  init->add_option("path", o.init_path, "Destination file (stdout when omitted or '-')");

  for (auto* sub : {simulate, fit, monitor, update, reproduce, config, init})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (init->parsed()) return config_init(o);
    Config cfg(o);
    if (simulate->parsed()) check(dprog_simulate(cfg.get()));
    else if (fit->parsed()) check(dprog_fit(cfg.get()));
    else if (monitor->parsed()) check(dprog_monitor(cfg.get()));
    else if (update->parsed()) check(dprog_update_evaluate(cfg.get()));
    else if (reproduce->parsed()) {
      char* report = nullptr;
      check(dprog_reproduce_paper(cfg.get(), &report));
      std::cout << take(report);
    }
  } catch (const CliFailure& f) {
    std::cerr << "error [" << dprog_status_name(f.status) << "]: " << dprog_last_error() << "\n";
    return static_cast<int>(f.status);
  }
  return 0;
}
