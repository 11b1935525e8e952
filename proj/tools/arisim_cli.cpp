#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "arisim/config.hpp"
#include "arisim/csv.hpp"
#include "arisim/errors.hpp"
#include "arisim/experiments.hpp"

namespace {

// --out beats the config file's output entry beats "<id>.csv". A relative
// result is placed under $ARISIM_OUTPUT_DIR when that is set.
std::string resolve_output(std::string path, const std::string& id) {
  if (path.empty()) path = id + ".csv";
  const char* dir = std::getenv("ARISIM_OUTPUT_DIR");
  if (dir && *dir && path.front() != '/') {
    path = std::string(dir) + "/" + path;
  }
  return path;
}

arisim::config::ExperimentConfig make_config(const std::string& experiment,
                                             const std::string& config_path) {
  if (config_path.empty()) {
    if (experiment.empty()) {
      throw arisim::ConfigError("provide --experiment or --config");
    }
    return arisim::config::default_config(experiment);
  }
  arisim::config::ExperimentConfig cfg =
      arisim::config::load_config(config_path);
  if (!experiment.empty() && experiment != cfg.id) {
    throw arisim::ConfigError("--experiment '" + experiment +
                              "' conflicts with config experiment '" + cfg.id +
                              "'");
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"active-RIS link-level experiment runner"};
  app.require_subcommand(1);

  std::string experiment, config_path, out_path, validate_path;
  std::uint64_t seed = 0;
  long trials = 0;

  CLI::App* run = app.add_subcommand("run", "run an experiment, write CSV");
  run->add_option("--experiment", experiment, "registered experiment id");
  run->add_option("--config", config_path, "JSON configuration path");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "Monte Carlo base seed");
  CLI::Option* trials_opt =
      run->add_option("--trials", trials, "Monte Carlo trial count");
  run->add_option("--out", out_path, "output CSV path");

  CLI::App* list =
      app.add_subcommand("list-experiments", "print registered ids");

  CLI::App* validate =
      app.add_subcommand("validate", "parse and resolve a config, then exit");
  validate->add_option("--config", validate_path, "JSON configuration path")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (list->parsed()) {
      for (const auto& id : arisim::config::experiment_ids()) {
        std::cout << id << "\n";
      }
      return 0;
    }
    if (validate->parsed()) {
      arisim::config::ExperimentConfig cfg =
          arisim::config::load_config(validate_path);
      std::cout << "OK " << cfg.id << " trials=" << cfg.trials
                << " seed=" << cfg.seed << "\n";
      return 0;
    }
    arisim::config::ExperimentConfig cfg =
        make_config(experiment, config_path);
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (trials_opt->count() > 0) cfg.trials = trials;
    if (!out_path.empty()) cfg.output_path = out_path;
    cfg.validate();

    auto t0 = std::chrono::steady_clock::now();
    arisim::csv::ResultTable table = arisim::experiments::run_experiment(cfg);
    auto t1 = std::chrono::steady_clock::now();
    double wall_s = std::chrono::duration<double>(t1 - t0).count();

    std::string path = resolve_output(cfg.output_path, cfg.id);
    arisim::csv::emit_csv(table, path);
    std::cerr << "wall_time_s: " << wall_s << "\n";
    std::cout << path << "\n";
    return 0;
  } catch (const arisim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
