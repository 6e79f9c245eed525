#include "fpinn/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "fpinn/analysis.hpp"
#include "fpinn/fdm.hpp"
#include "fpinn/harness/csv.hpp"
#include "fpinn/harness/svg.hpp"

namespace fpinn::harness {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kExperimentKeys = {"case",     "variants",        "seeds",       "k_list",
                                               "output",   "test_points",     "fdm_points",  "spectrum_points",
                                               "tail_cutoff"};
const std::set<std::string> kCollocationKeys = {"interior", "boundary", "scheme"};
const std::set<std::string> kModelKeys = {"hidden",      "max_freq",       "include_constant", "fourier_period",
                                          "exp_alpha",   "train_alpha",    "freeze_fourier",   "single_precision"};
const std::set<std::string> kScheduleKeys = {
    "warm_start_iters", "outer_rounds", "inner_ls_rounds", "gd_block_iters", "adam_iters",     "lbfgs_iters",
    "prune_threshold",  "reg_strength", "boundary_weight", "lr",             "lr_decay",       "lr_decay_steps",
    "history_every",    "lbfgs_memory", "lbfgs_grad_tol", "nonlinear_ls"};
const std::set<std::string> kVariantOnlyKeys = {"base", "rff_scales", "rff_features", "residual_weight"};

void check_keys(const ConfigFile& f, const std::string& section, const std::vector<const std::set<std::string>*>& allowed) {
  for (const auto& key : f.keys(section)) {
    bool ok = false;
    for (const auto* s : allowed) ok = ok || s->count(key);
    if (!ok) throw ConfigError(f.origin() + ": unknown key [" + section + "] " + key);
  }
}

int to_int(long v, const std::string& what) {
  if (v < 0 || v > 100000000) throw ConfigError(what + " out of range");
  return static_cast<int>(v);
}

void apply_model(const ConfigFile& f, const std::string& sec, ModelConfig& m) {
  if (f.has(sec, "hidden")) {
    m.hidden.clear();
    for (long h : f.int_list(sec, "hidden")) m.hidden.push_back(to_int(h, "hidden"));
  }
  m.max_freq = to_int(f.integer(sec, "max_freq", m.max_freq), "max_freq");
  m.include_constant = f.flag(sec, "include_constant", m.include_constant);
  if (f.has(sec, "fourier_period")) m.fourier_period = f.num_list(sec, "fourier_period");
  m.exp_alpha = f.num(sec, "exp_alpha", m.exp_alpha);
  m.train_alpha = f.flag(sec, "train_alpha", m.train_alpha);
  m.freeze_fourier = f.flag(sec, "freeze_fourier", m.freeze_fourier);
  m.single_precision = f.flag(sec, "single_precision", m.single_precision);
}

void apply_schedule(const ConfigFile& f, const std::string& sec, TrainingSchedule& s) {
  s.warm_start_iters = to_int(f.integer(sec, "warm_start_iters", s.warm_start_iters), "warm_start_iters");
  s.outer_rounds = to_int(f.integer(sec, "outer_rounds", s.outer_rounds), "outer_rounds");
  s.inner_ls_rounds = to_int(f.integer(sec, "inner_ls_rounds", s.inner_ls_rounds), "inner_ls_rounds");
  s.gd_block_iters = to_int(f.integer(sec, "gd_block_iters", s.gd_block_iters), "gd_block_iters");
  s.adam_iters = to_int(f.integer(sec, "adam_iters", s.adam_iters), "adam_iters");
  s.lbfgs_iters = to_int(f.integer(sec, "lbfgs_iters", s.lbfgs_iters), "lbfgs_iters");
  s.prune_threshold = f.num(sec, "prune_threshold", s.prune_threshold);
  s.reg_strength = f.num(sec, "reg_strength", s.reg_strength);
  s.boundary_weight = f.num(sec, "boundary_weight", s.boundary_weight);
  s.adam.lr0 = f.num(sec, "lr", s.adam.lr0);
  s.adam.decay = f.num(sec, "lr_decay", s.adam.decay);
  s.adam.decay_steps = f.integer(sec, "lr_decay_steps", s.adam.decay_steps);
  s.history_every = to_int(f.integer(sec, "history_every", s.history_every), "history_every");
  s.lbfgs.memory = to_int(f.integer(sec, "lbfgs_memory", s.lbfgs.memory), "lbfgs_memory");
  s.lbfgs.grad_tol = f.num(sec, "lbfgs_grad_tol", s.lbfgs.grad_tol);
  if (f.has(sec, "nonlinear_ls")) {
    const auto v = f.str(sec, "nonlinear_ls");
    if (v == "picard")
      s.nonlinear_ls = NonlinearLs::picard;
    else if (v == "newton")
      s.nonlinear_ls = NonlinearLs::newton;
    else
      throw ConfigError("[" + sec + "] nonlinear_ls: expected picard or newton, got '" + v + "'");
  }
}

std::string join_names(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::vector<std::pair<std::string, PdeProblem>> problems_of(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, PdeProblem>> out;
  if (cfg.k_list.empty()) {
    out.emplace_back(cfg.case_name, make_problem(cfg.case_name));
  } else {
    for (int k : cfg.k_list) {
      ProblemParams pp;
      pp.k = k;
      auto p = make_problem(cfg.case_name, pp);
      out.emplace_back(p.name, std::move(p));
    }
  }
  return out;
}

// Points along the first axis for spectra: N samples of [a, a + L); 2D cases
// use the midline of the second axis.
Eigen::MatrixXd spectrum_points(const PdeProblem& p, int n, double& length) {
  length = p.upper(0) - p.lower(0);
  const Vector x = spectrum_grid(length, n).array() + p.lower(0);
  Eigen::MatrixXd pts(n, p.dim());
  pts.col(0) = x;
  for (Eigen::Index d = 1; d < p.dim(); ++d) pts.col(d).setConstant(0.5 * (p.lower(d) + p.upper(d)));
  return pts;
}

struct SpectrumData {
  Spectrum truth, model;
};

SpectrumData spectra(const PdeProblem& p, const SurrogateModel& m, int n) {
  double length = 0;
  const auto pts = spectrum_points(p, n, length);
  return {dft_auto(truth_values(p, pts), length), dft_auto(predict(m, pts), length)};
}

CsvTable spectrum_table(const SpectrumData& s) {
  CsvTable t;
  t.header = kSpectrumHeader;
  for (int k = 0; k <= s.truth.kmax(); ++k) {
    const double at = std::abs(s.truth.at(k)), am = std::abs(s.model.at(k));
    t.add_row({fmt(k), fmt(at), fmt(am), fmt(std::abs(am - at))});
  }
  return t;
}

void log_line(const RunOptions& opt, const std::string& msg) {
  if (opt.log) opt.log(msg);
}

std::string run_tag(const RunResult& r) {
  std::string s = r.label + " seed " + std::to_string(r.seed);
  if (r.k) s += " k " + std::to_string(r.k);
  return s;
}

// Runs every (problem, spec, seed) job with the configured parallelism.
struct Job {
  const PdeProblem* problem;
  const RunSpec* spec;
  std::uint64_t seed;
  int k;
};

std::vector<RunResult> run_jobs(const ExperimentConfig& cfg, const std::vector<Job>& jobs, const RunOptions& opt,
                                bool keep_models) {
  std::vector<RunResult> results(jobs.size());
  std::mutex log_mutex;
  parallel_for(jobs.size(), opt.jobs, [&](std::size_t i) {
    const auto& j = jobs[i];
    results[i] = run_one(cfg, *j.problem, *j.spec, j.seed);
    results[i].k = j.k;
    if (!keep_models) results[i].model.reset();
    std::lock_guard<std::mutex> lock(log_mutex);
    const auto& r = results[i];
    char buf[160];
    if (r.aborted)
      log_line(opt, "[" + run_tag(r) + "] aborted: " + r.abort_reason);
    else {
      std::snprintf(buf, sizeof buf, "rel_l2 %.3e  fourier %ld  nn %ld  %.1fs", r.rel_l2, r.n_active_fourier,
                    r.n_active_nn, r.wall_seconds);
      log_line(opt, "[" + run_tag(r) + "] " + buf);
    }
  });
  return results;
}

CsvTable report_table(const std::vector<RunResult>& results, const std::vector<std::string>& case_names,
                      bool timing) {
  CsvTable t;
  t.header = kReportHeader;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    t.add_row({fmt(static_cast<long>(r.seed)), r.label, case_names[i], fmt(r.aborted ? std::nan("") : r.rel_l2),
               fmt(timing ? r.wall_seconds : 0.0), fmt(r.n_active_fourier), fmt(r.n_active_nn)});
  }
  return t;
}

CsvTable history_table(const TrainingHistory& h) {
  CsvTable t;
  t.header = kHistoryHeader;
  for (const auto& row : h.rows)
    t.add_row({fmt(row.iter), row.phase, fmt(row.loss.total), fmt(row.loss.boundary), fmt(row.loss.residual),
               fmt(row.rel_l2)});
  return t;
}

const std::vector<std::string> kSummaryHeader = {"variant", "n", "min", "q1", "median", "q3", "max"};

std::vector<std::string> summary_row(const std::string& label, const FiveNumber& s) {
  return {label, fmt(static_cast<long>(s.n)), fmt(s.min), fmt(s.q1), fmt(s.median), fmt(s.q3), fmt(s.max)};
}

std::vector<double> errors_for(const std::vector<RunResult>& results, const std::string& label, int k = 0) {
  std::vector<double> out;
  for (const auto& r : results)
    if (r.label == label && r.k == k) out.push_back(r.aborted ? std::nan("") : r.rel_l2);
  return out;
}

void write_timing(const fs::path& dir, const std::vector<RunResult>& results) {
  std::ofstream f(dir / "timing.txt");
  for (const auto& r : results) {
    f << run_tag(r) << ": total " << r.wall_seconds << " s";
    for (const auto& [phase, secs] : r.history.phase_seconds) f << ", " << phase << " " << secs << " s";
    f << "\n";
  }
}

void write_retained(const fs::path& dir, const std::vector<RunResult>& results) {
  CsvTable t;
  t.header = {"seed", "variant", "retained_fourier", "n_active_nn", "n_pruned_nn"};
  for (const auto& r : results) {
    long pruned = 0;
    for (const auto& e : r.history.prune_events) pruned += static_cast<long>(e.removed_nn.size());
    t.add_row({fmt(static_cast<long>(r.seed)), r.label, r.retained_fourier, fmt(r.n_active_nn), fmt(pruned)});
  }
  write_csv((dir / "retained.csv").string(), t);
}

int exit_code(const std::vector<RunResult>& results) {
  for (const auto& r : results)
    if (r.aborted) return 3;
  return 0;
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

}  // namespace

// Config ----------------------------------------------------------------------

ExperimentConfig load_experiment(const ConfigFile& f, const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  for (const auto& sec : f.sections()) {
    if (sec == "experiment")
      check_keys(f, sec, {&kExperimentKeys});
    else if (sec == "collocation")
      check_keys(f, sec, {&kCollocationKeys});
    else if (sec == "model")
      check_keys(f, sec, {&kModelKeys});
    else if (sec == "schedule")
      check_keys(f, sec, {&kScheduleKeys});
    else if (sec.rfind("variant.", 0) == 0)
      check_keys(f, sec, {&kVariantOnlyKeys, &kModelKeys, &kScheduleKeys});
    else if (sec.empty())
      throw ConfigError(f.origin() + ": keys before the first [section]");
    else
      throw ConfigError(f.origin() + ": unknown section [" + sec + "]");
  }

  cfg.case_name = f.str("experiment", "case");
  for (long k : f.int_list("experiment", "k_list")) {
    if (k < 1) throw ConfigError("k_list entries must be >= 1");
    cfg.k_list.push_back(static_cast<int>(k));
  }
  for (long s : f.int_list("experiment", "seeds")) {
    if (s < 0) throw ConfigError("seeds must be non-negative");
    cfg.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (cfg.seeds.empty()) cfg.seeds = {0};
  cfg.test_points = to_int(f.integer("experiment", "test_points", cfg.test_points), "test_points");
  cfg.fdm_points = to_int(f.integer("experiment", "fdm_points", cfg.fdm_points), "fdm_points");
  cfg.spectrum_points = to_int(f.integer("experiment", "spectrum_points", cfg.spectrum_points), "spectrum_points");
  cfg.tail_cutoff = to_int(f.integer("experiment", "tail_cutoff", cfg.tail_cutoff), "tail_cutoff");
  cfg.output_dir = f.str("experiment", "output", "out/" + name);
  if (cfg.spectrum_points < 4 || cfg.spectrum_points % 2) throw ConfigError("spectrum_points must be even and >= 4");

  cfg.n_interior = to_int(f.integer("collocation", "interior", cfg.n_interior), "interior");
  cfg.n_boundary = to_int(f.integer("collocation", "boundary", cfg.n_boundary), "boundary");
  const std::string scheme = f.str("collocation", "scheme", "equispaced");
  if (scheme == "equispaced")
    cfg.scheme = Scheme::equispaced;
  else if (scheme == "uniform_random")
    cfg.scheme = Scheme::uniform_random;
  else
    throw ConfigError("unknown collocation scheme '" + scheme + "'; valid: equispaced, uniform_random");

  std::vector<std::pair<std::string, PdeProblem>> problems;
  try {
    problems = problems_of(cfg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  ModelConfig base_model;
  apply_model(f, "model", base_model);
  TrainingSchedule base_schedule;
  apply_schedule(f, "schedule", base_schedule);

  const auto labels = f.list("experiment", "variants");
  if (labels.empty())
    throw ConfigError(f.origin() + ": [experiment] variants is empty; registered variants: " +
                      join_names(variant_names()));
  std::set<std::string> seen;
  for (const auto& label : labels) {
    if (!seen.insert(label).second) throw ConfigError("duplicate variant label '" + label + "'");
    const std::string sec = "variant." + label;
    RunSpec spec;
    spec.label = label;
    const std::string base = f.str(sec, "base", label);
    try {
      spec.variant.tag = parse_variant(base);
    } catch (const std::invalid_argument&) {
      throw ConfigError("unknown variant '" + base + "'; registered variants: " + join_names(variant_names()));
    }
    spec.variant.rff_scales = f.num_list(sec, "rff_scales");
    if (spec.variant.tag == VariantTag::rff_pinn && spec.variant.rff_scales.empty()) spec.variant.rff_scales = {1.0};
    spec.variant.rff_features_per_scale =
        to_int(f.integer(sec, "rff_features", spec.variant.rff_features_per_scale), "rff_features");
    spec.variant.residual_weight = f.num(sec, "residual_weight", spec.variant.residual_weight);
    spec.model = base_model;
    apply_model(f, sec, spec.model);
    spec.schedule = base_schedule;
    apply_schedule(f, sec, spec.schedule);
    try {
      validate(spec.schedule);
      for (const auto& [pname, problem] : problems) make_model(spec.variant, problem, spec.model);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("variant '" + label + "': " + e.what());
    }
    cfg.runs.push_back(std::move(spec));
  }
  return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
  return load_experiment(ConfigFile::load(path), fs::path(path).stem().string());
}

void apply_options(ExperimentConfig& cfg, const RunOptions& opt) {
  if (opt.out_dir) cfg.output_dir = *opt.out_dir;
  if (opt.seed_override) cfg.seeds = {*opt.seed_override};
}

// Statistics ------------------------------------------------------------------

double quantile7(std::vector<double> sorted, double p) {
  if (sorted.empty()) return std::nan("");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

FiveNumber five_number(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  std::sort(v.begin(), v.end());
  FiveNumber s;
  s.n = v.size();
  if (v.empty()) {
    s.min = s.q1 = s.median = s.q3 = s.max = std::nan("");
    return s;
  }
  s.min = v.front();
  s.max = v.back();
  s.q1 = quantile7(v, 0.25);
  s.median = quantile7(v, 0.5);
  s.q3 = quantile7(v, 0.75);
  return s;
}

// Runs ------------------------------------------------------------------------

std::string retained_fourier(const SurrogateModel& m) {
  if (!m.has_fourier()) return "";
  std::string out;
  auto add = [&](const std::string& s) { out += (out.empty() ? "" : " ") + s; };
  if (m.dim == 1) {
    for (int n : m.fourier1d.active_freqs) add(std::to_string(n));
    return out;
  }
  const auto& L = m.fourier2d;
  auto feature = [&](int axis, Eigen::Index j) -> std::string {
    if (L.include_constant) {
      if (j == 0) return "1";
      --j;
    }
    return (j % 2 == 0 ? "c" : "s") + std::to_string(L.freqs[axis][static_cast<std::size_t>(j / 2)]);
  };
  const Eigen::Index f0 = L.axis_features(0);
  for (Eigen::Index idx = 0; idx < L.beta.size(); ++idx)
    if (L.active[static_cast<std::size_t>(idx)]) add(feature(0, idx % f0) + "x" + feature(1, idx / f0));
  return out;
}

RunResult run_one(const ExperimentConfig& cfg, const PdeProblem& problem, const RunSpec& spec, std::uint64_t seed) {
  RunResult r;
  r.seed = seed;
  r.label = spec.label;
  TrainingData data;
  data.collocation = sample_collocation(problem, cfg.n_interior, cfg.n_boundary, cfg.scheme, seed);
  data.test_points = test_grid(problem, cfg.test_points);
  data.test_truth = truth_values(problem, data.test_points);
  ModelConfig mc = spec.model;
  mc.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto result = train(spec.variant, problem, mc, spec.schedule, data);
    r.history = std::move(result.history);
    r.rel_l2 = r.history.final_rel_l2;
    r.n_active_fourier = static_cast<long>(result.model.active_fourier());
    r.n_active_nn = static_cast<long>(result.model.active_nn());
    r.retained_fourier = retained_fourier(result.model);
    r.model = std::move(result.model);
  } catch (const TrainingAborted& e) {
    r.aborted = true;
    r.abort_reason = e.what();
    r.rel_l2 = std::nan("");
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Subcommands -----------------------------------------------------------------

int run_solve(const ExperimentConfig& cfg, const RunOptions& opt) {
  const PdeProblem problem = problems_of(cfg).front().second;
  std::vector<Job> jobs;
  for (const auto& spec : cfg.runs)
    for (auto seed : cfg.seeds) jobs.push_back({&problem, &spec, seed, 0});
  const auto results = run_jobs(cfg, jobs, opt, true);

  const fs::path dir = prepare_dir(cfg.output_dir);
  write_csv((dir / "report.csv").string(),
            report_table(results, std::vector<std::string>(results.size(), problem.name), opt.timing));
  CsvTable summary;
  summary.header = kSummaryHeader;
  for (const auto& spec : cfg.runs) summary.add_row(summary_row(spec.label, five_number(errors_for(results, spec.label))));
  write_csv((dir / "summary.csv").string(), summary);
  write_retained(dir, results);
  write_timing(dir, results);

  const bool single = cfg.runs.size() == 1;
  Chart err{"relative l2 error during training: " + problem.name, "iteration", "relative l2", {}};
  Chart spec_chart{"spectrum magnitude: " + problem.name, "k", "|coefficient|", {}};
  bool truth_added = false;
  for (const auto& r : results) {
    const std::string suffix = (single ? "" : r.label + "_") + std::to_string(r.seed);
    write_csv((dir / ("history_" + suffix + ".csv")).string(), history_table(r.history));
    Series s{r.label + " seed " + std::to_string(r.seed), {}, {}};
    for (const auto& row : r.history.rows) {
      s.x.push_back(static_cast<double>(row.iter));
      s.y.push_back(row.rel_l2);
    }
    err.series.push_back(std::move(s));
    if (!r.model) continue;
    const auto sd = spectra(problem, *r.model, cfg.spectrum_points);
    const auto table = spectrum_table(sd);
    write_csv((dir / ("spectrum_" + suffix + ".csv")).string(), table);
    if (r.seed != cfg.seeds.front()) continue;
    const auto k = table.numeric_column("k");
    if (!truth_added) {
      spec_chart.series.push_back({"truth", k, table.numeric_column("amp_truth")});
      truth_added = true;
    }
    spec_chart.series.push_back({r.label, k, table.numeric_column("amp_model")});
  }
  write_svg((dir / "plot_error.svg").string(), err);
  write_svg((dir / "plot_spectrum.svg").string(), spec_chart);
  return exit_code(results);
}

int run_sweep(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (cfg.k_list.empty()) throw ConfigError("sweep needs a non-empty [experiment] k_list");
  const auto problems = problems_of(cfg);
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < problems.size(); ++i)
    for (const auto& spec : cfg.runs)
      for (auto seed : cfg.seeds) jobs.push_back({&problems[i].second, &spec, seed, cfg.k_list[i]});
  const auto results = run_jobs(cfg, jobs, opt, false);

  std::vector<double> fdm_err;
  for (const auto& [name, p] : problems) {
    const auto g = make_grid(p, cfg.fdm_points);
    const auto sol = fdm_solve(p, g);
    Eigen::MatrixXd nodes = g.nodes();
    fdm_err.push_back(relative_l2(sol.u, truth_values(p, nodes)));
  }

  const fs::path dir = prepare_dir(cfg.output_dir);
  std::vector<std::string> case_names;
  for (const auto& r : results)
    for (std::size_t i = 0; i < problems.size(); ++i)
      if (cfg.k_list[i] == r.k) case_names.push_back(problems[i].first);
  write_csv((dir / "report.csv").string(), report_table(results, case_names, opt.timing));
  write_timing(dir, results);

  CsvTable medians, spread;
  medians.header = {"k"};
  for (const auto& spec : cfg.runs) medians.header.push_back(spec.label);
  medians.header.push_back("fdm");
  spread.header = {"k", "method", "n", "min", "q1", "median", "q3", "max"};
  std::map<std::string, Series> lines;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const int k = cfg.k_list[i];
    std::vector<std::string> row = {fmt(k)};
    auto add = [&](const std::string& method, const std::vector<double>& errs) {
      const auto s = five_number(errs);
      row.push_back(fmt(s.median));
      auto sr = summary_row(method, s);
      sr.insert(sr.begin(), fmt(k));
      spread.add_row(std::move(sr));
      auto& line = lines[method];
      line.label = method;
      line.x.push_back(k);
      line.y.push_back(s.median);
    };
    for (const auto& spec : cfg.runs) add(spec.label, errors_for(results, spec.label, k));
    add("fdm", std::vector<double>(cfg.seeds.size(), fdm_err[i]));
    medians.add_row(std::move(row));
  }
  write_csv((dir / "sweep.csv").string(), medians);
  write_csv((dir / "sweep_spread.csv").string(), spread);
  Chart chart{"median relative l2 error vs frequency: " + cfg.case_name, "k", "relative l2", {}};
  chart.markers = true;
  for (const auto& spec : cfg.runs) chart.series.push_back(lines[spec.label]);
  chart.series.push_back(lines["fdm"]);
  write_svg((dir / "sweep.svg").string(), chart);
  return exit_code(results);
}

int run_spectrum(const ExperimentConfig& cfg, const RunOptions& opt) {
  static const std::vector<std::string> analysis_cases = {"poisson1d_sweep", "poisson1d_two_tone",
                                                          "poisson1d_gauss_mod", "poisson1d_poly_sine"};
  const auto problems = problems_of(cfg);
  if (problems.size() != 1) throw ConfigError("spectrum takes a single case (give k inside the case name)");
  const PdeProblem& problem = problems.front().second;
  const std::string base = cfg.case_name.substr(0, cfg.case_name.find('('));
  if (std::find(analysis_cases.begin(), analysis_cases.end(), base) == analysis_cases.end())
    throw ConfigError("spectrum case must be one of: " + join_names(analysis_cases));

  std::vector<Job> jobs;
  for (const auto& spec : cfg.runs)
    for (auto seed : cfg.seeds) jobs.push_back({&problem, &spec, seed, 0});
  const auto results = run_jobs(cfg, jobs, opt, true);

  const fs::path dir = prepare_dir(cfg.output_dir);
  write_csv((dir / "report.csv").string(),
            report_table(results, std::vector<std::string>(results.size(), problem.name), opt.timing));
  write_timing(dir, results);

  CsvTable tail, coeff;
  tail.header = {"source", "seed", "tail_energy"};
  coeff.header = {"seed", "variant", "max_abs_err", "mean_abs_err"};
  double length = 0;
  const auto pts = spectrum_points(problem, cfg.spectrum_points, length);
  const Spectrum truth = dft_auto(truth_values(problem, pts), length);
  tail.add_row({"truth", "-", fmt(tail_energy(truth, cfg.tail_cutoff))});
  std::map<std::string, std::vector<double>> tails;
  Chart amp{"spectrum magnitude: " + problem.name, "k", "|coefficient|", {}};
  Chart err{"spectrum error: " + problem.name, "k", "abs error", {}};
  for (const auto& r : results) {
    if (!r.model) continue;
    const Spectrum model = dft_auto(predict(*r.model, pts), length);
    const auto table = spectrum_table({truth, model});
    write_csv((dir / ("spectrum_" + r.label + "_" + std::to_string(r.seed) + ".csv")).string(), table);
    const double te = tail_energy(model, cfg.tail_cutoff);
    tails[r.label].push_back(te);
    tail.add_row({r.label, fmt(static_cast<long>(r.seed)), fmt(te)});
    const auto e = table.numeric_column("abs_err");
    double mx = 0, sum = 0;
    for (double v : e) mx = std::max(mx, v), sum += v;
    coeff.add_row({fmt(static_cast<long>(r.seed)), r.label, fmt(mx), fmt(sum / static_cast<double>(e.size()))});
    if (r.seed != cfg.seeds.front()) continue;
    const auto k = table.numeric_column("k");
    if (amp.series.empty()) amp.series.push_back({"truth", k, table.numeric_column("amp_truth")});
    amp.series.push_back({r.label, k, table.numeric_column("amp_model")});
    err.series.push_back({r.label, k, e});
  }
  write_csv((dir / "tail_energy.csv").string(), tail);
  write_csv((dir / "coeff_error.csv").string(), coeff);
  CsvTable tail_summary;
  tail_summary.header = {"variant", "median_tail_energy"};
  for (const auto& spec : cfg.runs) tail_summary.add_row({spec.label, fmt(five_number(tails[spec.label]).median)});
  write_csv((dir / "tail_summary.csv").string(), tail_summary);
  write_svg((dir / "plot_spectrum.svg").string(), amp);
  write_svg((dir / "plot_spectrum_error.svg").string(), err);
  return exit_code(results);
}

int run_compare(const std::vector<ExperimentConfig>& cfgs, const RunOptions& opt) {
  CsvTable table;
  table.header = {"config", "variant", "n", "min", "q1", "median", "q3", "max"};
  Chart chart{"median relative l2 error per config", "config index", "relative l2", {}};
  chart.markers = true;
  std::map<std::string, Series> lines;
  std::vector<std::string> order;
  int code = 0;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    ExperimentConfig cfg = cfgs[i];
    if (opt.out_dir) cfg.output_dir = (fs::path(*opt.out_dir) / cfg.name).string();
    RunOptions sub = opt;
    sub.out_dir.reset();
    log_line(opt, "== " + cfg.name);
    code = std::max(code, run_solve(cfg, sub));
    const auto report = read_csv((fs::path(cfg.output_dir) / "report.csv").string());
    const auto errs = report.numeric_column("rel_l2");
    const int vc = report.column("variant");
    for (const auto& spec : cfg.runs) {
      std::vector<double> v;
      for (std::size_t r = 0; r < report.rows.size(); ++r)
        if (report.rows[r][vc] == spec.label) v.push_back(errs[r]);
      const auto s = five_number(v);
      auto row = summary_row(spec.label, s);
      row.insert(row.begin(), cfg.name);
      table.add_row(std::move(row));
      if (!lines.count(spec.label)) order.push_back(spec.label);
      auto& line = lines[spec.label];
      line.label = spec.label;
      line.x.push_back(static_cast<double>(i));
      line.y.push_back(s.median);
    }
  }
  const fs::path dir = prepare_dir(opt.out_dir.value_or("out/compare"));
  write_csv((dir / "compare.csv").string(), table);
  for (const auto& l : order) chart.series.push_back(lines[l]);
  write_svg((dir / "compare.svg").string(), chart);
  return code;
}

}  // namespace fpinn::harness
