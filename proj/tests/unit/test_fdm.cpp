#include <random>

#include <gtest/gtest.h>

#include "fpinn/analysis.hpp"
#include "fpinn/fdm.hpp"
#include "oracles.hpp"

using namespace fpinn;

TEST(Thomas, MatchesDenseElimination) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1, 1);
  const int n = 30;
  Vector lo(n), d(n), up(n), r(n);
  for (int i = 0; i < n; ++i) lo(i) = u(rng), up(i) = u(rng), d(i) = 4 + u(rng), r(i) = u(rng);
  DenseMatrix a = DenseMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = d(i);
    if (i > 0) a(i, i - 1) = lo(i);
    if (i + 1 < n) a(i, i + 1) = up(i);
  }
  EXPECT_LT((thomas_solve(lo, d, up, r) - oracle::gauss_solve(a, r)).norm(), 1e-13);
}

TEST(Fdm, PoissonAndAllenCahnAccuracyAtThousandNodes) {
  for (int k : {2, 6, 10})
    for (const char* base : {"poisson1d_sweep", "allencahn1d_sweep"}) {
      const auto p = make_problem(base, ProblemParams{k});
      const auto g = make_grid(p, 1000);
      const auto sol = fdm_solve(p, g);
      EXPECT_TRUE(sol.converged);
      const Eigen::MatrixXd nodes = g.nodes();
      EXPECT_LE(relative_l2(sol.u, truth_values(p, nodes)), 1e-3) << p.name;
      EXPECT_LE(fdm_residual(p, g, sol.u).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(Fdm, SecondOrderConvergence) {
  for (const char* name : {"poisson1d_sweep(6)", "allencahn1d_sweep(6)"}) {
    const auto p = make_problem(name);
    std::vector<double> err;
    for (int n : {201, 401, 801}) {
      const auto g = make_grid(p, n);
      const Eigen::MatrixXd nodes = g.nodes();
      err.push_back((fdm_solve(p, g).u - truth_values(p, nodes)).cwiseAbs().maxCoeff());
    }
    for (std::size_t i = 1; i < err.size(); ++i) {
      const double order = std::log(err[i - 1] / err[i]) / std::log(2.0);
      EXPECT_NEAR(order, 2.0, 0.3) << name;
    }
  }
}

TEST(Fdm, RejectsUnsupportedProblems) {
  EXPECT_THROW(fdm_solve(make_problem("wave1d"), Grid1D{10, 0, 1}), std::invalid_argument);
  EXPECT_THROW(fdm_solve(make_problem("poisson2d_single"), Grid1D{10, 0, 1}), std::invalid_argument);
}
