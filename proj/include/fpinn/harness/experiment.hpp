#pragma once

// Experiment runners behind the CLI. A config names one case, a list of
// variant labels and a list of seeds; each (variant, seed) pair is one
// independent training run.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fpinn/harness/config.hpp"
#include "fpinn/problems.hpp"
#include "fpinn/surrogate.hpp"
#include "fpinn/trainer.hpp"

namespace fpinn::harness {

/// A labelled variant: registered tag plus per-label model/schedule overrides
/// taken from a [variant.<label>] section.
struct RunSpec {
  std::string label;
  VariantSpec variant;
  ModelConfig model;
  TrainingSchedule schedule;
};

struct ExperimentConfig {
  std::string name;  // config file stem
  std::string case_name;
  std::vector<RunSpec> runs;
  std::vector<std::uint64_t> seeds;
  std::vector<int> k_list;  // sweep only
  int n_interior = 1000;
  int n_boundary = 2;
  Scheme scheme = Scheme::equispaced;
  int test_points = 10000;
  int fdm_points = 1000;
  int spectrum_points = 2048;
  int tail_cutoff = 30;
  std::string output_dir;
};

/// Parses and validates (cases, variants, variant/problem compatibility)
/// without training anything. Throws ConfigError.
ExperimentConfig load_experiment(const ConfigFile& file, const std::string& name);
ExperimentConfig load_experiment(const std::string& path);

struct RunOptions {
  int jobs = 1;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed_override;
  bool timing = false;  // real wall-clock in report.csv instead of 0
  std::function<void(const std::string&)> log;
};

/// Applies --out / --seed-override.
void apply_options(ExperimentConfig& cfg, const RunOptions& opt);

struct RunResult {
  std::uint64_t seed = 0;
  std::string label;
  int k = 0;  // sweep frequency, 0 otherwise
  bool aborted = false;
  std::string abort_reason;
  double rel_l2 = 0.0;
  double wall_seconds = 0.0;
  long n_active_fourier = 0;
  long n_active_nn = 0;
  std::string retained_fourier;  // space-separated
  TrainingHistory history;
  std::optional<SurrogateModel> model;
};

struct FiveNumber {
  std::size_t n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};
/// Type-7 (linear interpolation) quantiles; NaNs are ignored.
FiveNumber five_number(std::vector<double> values);
double quantile7(std::vector<double> sorted, double p);

/// Human-readable retained Fourier bases: "1 20 100" in 1D, "c3xs5 ..." in 2D.
std::string retained_fourier(const SurrogateModel& m);

/// Trains one (spec, seed) run on `problem` and evaluates it on the test grid.
RunResult run_one(const ExperimentConfig& cfg, const PdeProblem& problem, const RunSpec& spec, std::uint64_t seed);

/// Calls task(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& task);

/// Each returns the process exit code: 0 ok, 3 when any run aborted.
int run_solve(const ExperimentConfig& cfg, const RunOptions& opt);
int run_sweep(const ExperimentConfig& cfg, const RunOptions& opt);
int run_spectrum(const ExperimentConfig& cfg, const RunOptions& opt);
int run_compare(const std::vector<ExperimentConfig>& cfgs, const RunOptions& opt);

}  // namespace fpinn::harness
