#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fpinn/harness/config.hpp"
#include "fpinn/harness/csv.hpp"
#include "fpinn/harness/experiment.hpp"
#include "fpinn/harness/svg.hpp"
#include "oracles.hpp"

using namespace fpinn;
using namespace fpinn::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("fpinn_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + FPINN_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Tag-balance check: every element closes in order, attributes are quoted.
bool well_formed_xml(const std::string& s, std::string& why) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool root_seen = false;
  while ((i = s.find('<', i)) != std::string::npos) {
    const auto end = s.find('>', i);
    if (end == std::string::npos) return why = "unterminated tag", false;
    std::string tag = s.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.front() == '?') continue;
    if (std::count(tag.begin(), tag.end(), '"') % 2) return why = "unbalanced quotes in <" + tag + ">", false;
    if (tag.front() == '/') {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return why = "unexpected </" + name + ">", false;
      stack.pop_back();
      continue;
    }
    const std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
    if (stack.empty()) {
      if (root_seen) return why = "second root element", false;
      root_seen = true;
    }
    if (tag.back() != '/') stack.push_back(name);
  }
  if (!stack.empty()) return why = "unclosed <" + stack.back() + ">", false;
  return root_seen;
}

const char* kTinySolve = R"([experiment]
case = poisson1d_single
variants = fourier_pinn
seeds = 0
test_points = 1000
[collocation]
interior = 300
[schedule]
warm_start_iters = 50
outer_rounds = 1
inner_ls_rounds = 2
gd_block_iters = 50
lbfgs_iters = 20
history_every = 25
)";

}  // namespace

TEST(Config, ParsesSectionsListsAndComments) {
  const auto f = ConfigFile::parse("# top\n[a]\nx = 1.5  # trailing\nlist = 1, 2 ,3\nflag = yes\n\n[b]\nname=hello\n");
  EXPECT_EQ(f.sections(), (std::vector<std::string>{"a", "b"}));
  EXPECT_DOUBLE_EQ(f.num("a", "x", 0), 1.5);
  EXPECT_EQ(f.int_list("a", "list"), (std::vector<long>{1, 2, 3}));
  EXPECT_TRUE(f.flag("a", "flag", false));
  EXPECT_EQ(f.str("b", "name"), "hello");
  EXPECT_EQ(f.integer("b", "missing", 7), 7);
  EXPECT_THROW(f.str("b", "missing"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("[a]\nx = 1\nx = 2\n"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("[a\n"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("[a]\njunk\n"), ConfigError);
  EXPECT_THROW(ConfigFile::parse("[a]\nx = 1e\n").num("a", "x", 0), ConfigError);
}

TEST(Config, ExperimentValidationHappensUpFront) {
  auto load = [](const std::string& text) { return load_experiment(ConfigFile::parse(text), "t"); };
  const auto ok = load(kTinySolve);
  ASSERT_EQ(ok.runs.size(), 1u);
  EXPECT_EQ(ok.runs[0].schedule.warm_start_iters, 50);
  EXPECT_EQ(ok.output_dir, "out/t");

  try {
    load(std::string(kTinySolve).replace(std::string(kTinySolve).find("fourier_pinn"), 12, "foo"));
    FAIL();
  } catch (const ConfigError& e) {
    for (const auto& n : variant_names()) EXPECT_NE(std::string(e.what()).find(n), std::string::npos);
  }
  EXPECT_THROW(load("[experiment]\ncase = nowhere\nvariants = standard_pinn\n"), ConfigError);
  EXPECT_THROW(load("[experiment]\ncase = wave1d\nvariants = strong_bc_exp\n"), ConfigError);
  EXPECT_THROW(load(std::string(kTinySolve) + "[schedule2]\n"), ConfigError);
  EXPECT_THROW(load(std::string(kTinySolve) + "[model]\nwidth = 3\n"), ConfigError);
  EXPECT_THROW(load("[experiment]\ncase = poisson1d_sweep\nvariants = standard_pinn\n"), ConfigError);

  // labelled variants inherit from a registered base and override settings
  const auto lab = load(std::string(kTinySolve) +
                        "[variant.noreg]\nbase = fourier_pinn\nreg_strength = 0\nmax_freq = 8\n");
  EXPECT_EQ(lab.runs.size(), 1u);
  const auto two = load(std::string(kTinySolve).replace(std::string(kTinySolve).find("variants = fourier_pinn"), 23,
                                                        "variants = fourier_pinn, noreg") +
                        "[variant.noreg]\nbase = fourier_pinn\nreg_strength = 0\nmax_freq = 8\n");
  ASSERT_EQ(two.runs.size(), 2u);
  EXPECT_EQ(two.runs[1].variant.tag, VariantTag::fourier_pinn);
  EXPECT_EQ(two.runs[1].schedule.reg_strength, 0.0);
  EXPECT_EQ(two.runs[1].model.max_freq, 8);
  EXPECT_EQ(two.runs[0].model.max_freq, 128);
}

TEST(Csv, RoundTripIsIdentity) {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> nd;
  CsvTable t;
  t.header = kHistoryHeader;
  for (int i = 0; i < 50; ++i)
    t.add_row({fmt(i * 10), i % 2 ? "adam" : "lbfgs", fmt(std::exp(10 * nd(rng))), fmt(nd(rng)), fmt(1e-300 * nd(rng)),
               fmt(i == 3 ? std::nan("") : nd(rng))});
  const auto text = t.to_string();
  const auto back = parse_csv(text);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(back.to_string(), text);
  // numeric values survive bit-exactly
  const auto col = back.numeric_column("loss_boundary");
  for (std::size_t i = 0; i < col.size(); ++i) EXPECT_EQ(fmt(col[i]), t.rows[i][3]);
  EXPECT_THROW(t.add_row({"1"}), std::invalid_argument);
}

TEST(Csv, SchemaHeadersAreExact) {
  auto join = [](const std::vector<std::string>& h) {
    CsvTable t;
    t.header = h;
    return t.to_string();
  };
  EXPECT_EQ(join(kReportHeader), "seed,variant,case,rel_l2,wall_clock_s,n_active_fourier,n_active_nn\n");
  EXPECT_EQ(join(kHistoryHeader), "iter,phase,loss_total,loss_boundary,loss_residual,rel_l2\n");
  EXPECT_EQ(join(kSpectrumHeader), "k,amp_truth,amp_model,abs_err\n");
}

TEST(Summary, FiveNumberMatchesIndependentQuantiles) {
  std::mt19937_64 rng(72);
  std::lognormal_distribution<double> ln;
  for (int n : {1, 2, 3, 5, 8, 13}) {
    std::vector<double> v(n);
    for (auto& x : v) x = ln(rng);
    const auto s = five_number(v);
    EXPECT_EQ(s.n, static_cast<std::size_t>(n));
    EXPECT_EQ(s.min, *std::min_element(v.begin(), v.end()));
    EXPECT_EQ(s.max, *std::max_element(v.begin(), v.end()));
    EXPECT_DOUBLE_EQ(s.q1, oracle::q7(v, 0.25));
    EXPECT_DOUBLE_EQ(s.median, oracle::q7(v, 0.5));
    EXPECT_DOUBLE_EQ(s.q3, oracle::q7(v, 0.75));
  }
  EXPECT_DOUBLE_EQ(five_number({4, 1, 3, 2}).median, 2.5);
  EXPECT_EQ(five_number({1.0, std::nan(""), 3.0}).n, 2u);
}

TEST(Svg, SelfContainedAndWellFormed) {
  Chart c{"a < b & c", "x", "y", {}};
  c.series.push_back({"one", {0, 1, 2, 3}, {1, 1e-3, 0, 1e-5}});
  c.series.push_back({"two \"q\"", {0, 1}, {1e2, 1e-8}});
  c.markers = true;
  const auto svg = render_svg(c);
  std::string why;
  EXPECT_TRUE(well_formed_xml(svg, why)) << why;
  EXPECT_EQ(svg.find("href"), std::string::npos);
  EXPECT_EQ(svg.find("url("), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
  // empty chart still renders
  EXPECT_TRUE(well_formed_xml(render_svg(Chart{}), why)) << why;
}

TEST(Parallel, EveryIndexRunsOnceAndErrorsPropagate) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 100);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw std::runtime_error("x");
                            }),
               std::runtime_error);
}

TEST(Cli, SolveWritesArtifactsDeterministically) {
  const auto dir = scratch("solve");
  spit(dir / "tiny.cfg", kTinySolve);
  ASSERT_EQ(run_cli("solve " + (dir / "tiny.cfg").string() + " --out " + (dir / "a").string(), dir / "a.log"), 0)
      << slurp(dir / "a.log");
  for (const char* f : {"report.csv", "history_0.csv", "spectrum_0.csv", "plot_error.svg", "plot_spectrum.svg"})
    EXPECT_TRUE(fs::exists(dir / "a" / f)) << f;
  ASSERT_EQ(run_cli("solve " + (dir / "tiny.cfg").string() + " --out " + (dir / "b").string() + " --jobs 2",
                    dir / "b.log"),
            0);
  for (const auto& e : fs::directory_iterator(dir / "a"))
    if (e.path().extension() == ".csv")
      EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / e.path().filename())) << e.path().filename();

  const auto report = read_csv((dir / "a" / "report.csv").string());
  EXPECT_EQ(report.header, kReportHeader);
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_LT(report.numeric_column("rel_l2")[0], 1e-2);
  EXPECT_EQ(report.rows[0][report.column("wall_clock_s")], "0");
  const auto hist = read_csv((dir / "a" / "history_0.csv").string());
  EXPECT_EQ(hist.header, kHistoryHeader);
  EXPECT_EQ(parse_csv(slurp(dir / "a" / "history_0.csv")).to_string(), slurp(dir / "a" / "history_0.csv"));
  const auto spec = read_csv((dir / "a" / "spectrum_0.csv").string());
  EXPECT_EQ(spec.header, kSpectrumHeader);

  // summary statistics recompute from the per-seed column
  const auto summary = read_csv((dir / "a" / "summary.csv").string());
  EXPECT_EQ(summary.numeric_column("median")[0], report.numeric_column("rel_l2")[0]);

  std::string why;
  EXPECT_TRUE(well_formed_xml(slurp(dir / "a" / "plot_error.svg"), why)) << why;
}

TEST(Cli, SeedOverrideReplacesSeedList) {
  const auto dir = scratch("seed");
  spit(dir / "tiny.cfg", kTinySolve);
  ASSERT_EQ(run_cli("solve " + (dir / "tiny.cfg").string() + " --seed-override 5 -q --out " + (dir / "o").string(),
                    dir / "log"),
            0);
  EXPECT_TRUE(fs::exists(dir / "o" / "history_5.csv"));
  EXPECT_FALSE(fs::exists(dir / "o" / "history_0.csv"));
}

TEST(Cli, ValidationErrorsExitTwo) {
  const auto dir = scratch("bad");
  std::string bad = kTinySolve;
  bad.replace(bad.find("fourier_pinn"), 12, "foo");
  spit(dir / "bad.cfg", bad);
  EXPECT_EQ(run_cli("solve " + (dir / "bad.cfg").string() + " --out " + (dir / "o").string(), dir / "log"), 2);
  const auto log = slurp(dir / "log");
  for (const auto& n : variant_names()) EXPECT_NE(log.find(n), std::string::npos) << n;
  EXPECT_FALSE(fs::exists(dir / "o"));
  EXPECT_EQ(run_cli("solve " + (dir / "missing.cfg").string(), dir / "log2"), 2);
  EXPECT_EQ(run_cli("frobnicate", dir / "log3"), 2);
}

TEST(Cli, SweepTableShape) {
  const auto dir = scratch("sweep");
  spit(dir / "sweep.cfg", R"([experiment]
case = poisson1d_sweep
variants = standard_pinn, strong_bc_poly, strong_bc_exp
k_list = 2, 6, 10
seeds = 0, 1, 2
test_points = 500
[model]
hidden = 8, 8
[collocation]
interior = 100
[schedule]
adam_iters = 20
lbfgs_iters = 5
history_every = 10
)");
  ASSERT_EQ(run_cli("sweep " + (dir / "sweep.cfg").string() + " -q -j 3 --out " + (dir / "o").string(), dir / "log"),
            0)
      << slurp(dir / "log");
  const auto t = read_csv((dir / "o" / "sweep.csv").string());
  EXPECT_EQ(t.header, (std::vector<std::string>{"k", "standard_pinn", "strong_bc_poly", "strong_bc_exp", "fdm"}));
  ASSERT_EQ(t.rows.size(), 3u);
  for (double e : t.numeric_column("fdm")) EXPECT_LE(e, 1e-3);
  std::string why;
  EXPECT_TRUE(well_formed_xml(slurp(dir / "o" / "sweep.svg"), why)) << why;
}

TEST(Cli, SpectrumTruthOfTwoToneCase) {
  const auto dir = scratch("spectrum");
  spit(dir / "spec.cfg", R"([experiment]
case = poisson1d_two_tone
variants = standard_pinn, strong_bc_exp
seeds = 0
[model]
hidden = 8, 8
[collocation]
interior = 100
[schedule]
adam_iters = 10
lbfgs_iters = 0
)");
  ASSERT_EQ(run_cli("spectrum " + (dir / "spec.cfg").string() + " -q --out " + (dir / "o").string(), dir / "log"), 0)
      << slurp(dir / "log");
  const auto t = read_csv((dir / "o" / "spectrum_standard_pinn_0.csv").string());
  EXPECT_EQ(t.header, kSpectrumHeader);
  const auto k = t.numeric_column("k"), amp = t.numeric_column("amp_truth");
  std::vector<int> nonzero;
  for (std::size_t i = 0; i < k.size(); ++i)
    if (amp[i] > 1e-9) nonzero.push_back(static_cast<int>(k[i]));
  EXPECT_EQ(nonzero, (std::vector<int>{2, 16}));
  const auto tail = read_csv((dir / "o" / "tail_energy.csv").string());
  EXPECT_EQ(tail.rows.size(), 3u);
  // analysis cases only
  spit(dir / "wrong.cfg", "[experiment]\ncase = poisson1d_multi\nvariants = standard_pinn\n");
  EXPECT_EQ(run_cli("spectrum " + (dir / "wrong.cfg").string() + " -q", dir / "log2"), 2);
}

TEST(Cli, CompareTabulatesConfigs) {
  const auto dir = scratch("compare");
  spit(dir / "one.cfg", kTinySolve);
  std::string two = kTinySolve;
  two.replace(two.find("poisson1d_single"), 16, "poisson1d_sweep(3)");
  spit(dir / "two.cfg", two);
  ASSERT_EQ(run_cli("compare " + (dir / "one.cfg").string() + " " + (dir / "two.cfg").string() + " -q --out " +
                        (dir / "o").string(),
                    dir / "log"),
            0)
      << slurp(dir / "log");
  const auto t = read_csv((dir / "o" / "compare.csv").string());
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "one");
  EXPECT_TRUE(fs::exists(dir / "o" / "two" / "report.csv"));
}

TEST(Configs, BundledConfigsValidate) {
  int count = 0;
  for (const auto& e : fs::recursive_directory_iterator(FPINN_CONFIG_DIR))
    if (e.path().extension() == ".cfg") {
      EXPECT_NO_THROW(load_experiment(e.path().string())) << e.path();
      ++count;
    }
  EXPECT_GT(count, 0);
}
