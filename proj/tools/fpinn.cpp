// fpinn: solve / sweep / spectrum / compare experiments from config files.
// Exit codes: 0 ok, 2 invalid config, 3 a training run aborted.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fpinn/harness/experiment.hpp"

using namespace fpinn::harness;

int main(int argc, char** argv) {
  CLI::App app{"Fourier-PINN PDE laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  RunOptions opt;
  std::string out;
  long long seed_override = -1;
  bool quiet = false;
  app.add_option("--jobs,-j", opt.jobs, "concurrent (seed, variant) runs")->check(CLI::PositiveNumber);
  app.add_option("--out,-o", out, "output directory (overrides the config)");
  app.add_option("--seed-override", seed_override, "run a single seed instead of the config's list")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--timing", opt.timing, "write measured wall-clock seconds into report.csv");
  app.add_flag("--quiet,-q", quiet, "no progress lines on stderr");

  std::string config;
  std::vector<std::string> configs;
  auto* solve = app.add_subcommand("solve", "train every (variant, seed) of one config");
  solve->add_option("config", config, "config file")->required();
  auto* sweep = app.add_subcommand("sweep", "frequency sweep over [experiment] k_list, with an FDM column");
  sweep->add_option("config", config, "config file")->required();
  auto* spectrum = app.add_subcommand("spectrum", "spectra and tail energy of trained models");
  spectrum->add_option("config", config, "config file")->required();
  auto* compare = app.add_subcommand("compare", "solve several configs and tabulate error summaries");
  compare->add_option("configs", configs, "config files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (!out.empty()) opt.out_dir = out;
  if (seed_override >= 0) opt.seed_override = static_cast<std::uint64_t>(seed_override);
  if (!quiet) opt.log = [](const std::string& s) { std::cerr << s << std::endl; };

  std::vector<ExperimentConfig> loaded;
  try {
    if (compare->parsed()) {
      for (const auto& path : configs) {
        loaded.push_back(load_experiment(path));
        if (opt.seed_override) loaded.back().seeds = {*opt.seed_override};
      }
    } else {
      loaded.push_back(load_experiment(config));
      apply_options(loaded.back(), opt);
    }
  } catch (const ConfigError& e) {
    std::cerr << "fpinn: " << e.what() << "\n";
    return 2;
  }

  try {
    if (solve->parsed()) return run_solve(loaded.front(), opt);
    if (sweep->parsed()) return run_sweep(loaded.front(), opt);
    if (spectrum->parsed()) return run_spectrum(loaded.front(), opt);
    return run_compare(loaded, opt);
  } catch (const ConfigError& e) {
    std::cerr << "fpinn: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fpinn: " << e.what() << "\n";
    return 1;
  }
}
