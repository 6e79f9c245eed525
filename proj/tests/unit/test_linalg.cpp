#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fpinn/linalg.hpp"
#include "oracles.hpp"

using namespace fpinn;

namespace {

DenseMatrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> nd;
  DenseMatrix a(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) a(i, j) = nd(rng);
  return a;
}

}  // namespace

TEST(Qr, ReconstructsAndIsOrthonormal) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_matrix(rng, 30 + trial, 8 + trial);
    const auto qr = qr_decompose(a);
    EXPECT_LT((qr.q * qr.r - a).norm(), 1e-12 * a.norm());
    EXPECT_LT((qr.q.transpose() * qr.q - DenseMatrix::Identity(a.cols(), a.cols())).norm(), 1e-12);
    EXPECT_EQ(DenseMatrix(qr.r.triangularView<Eigen::StrictlyLower>()).norm(), 0.0);
    EXPECT_EQ(qr.rank, a.cols());
    EXPECT_FALSE(qr.rank_deficient);
  }
}

TEST(Qr, FlagsRankDeficiency) {
  std::mt19937_64 rng(2);
  auto a = random_matrix(rng, 20, 5);
  a.col(3) = 2.0 * a.col(1) - a.col(0);
  const auto qr = qr_decompose(a);
  EXPECT_TRUE(qr.rank_deficient);
  EXPECT_EQ(qr.rank, 4);
}

TEST(Qr, RejectsWideAndNonFinite) {
  EXPECT_THROW(qr_decompose(DenseMatrix::Ones(2, 3)), std::invalid_argument);
  DenseMatrix a = DenseMatrix::Ones(3, 2);
  a(1, 1) = std::nan("");
  EXPECT_THROW(qr_decompose(a), std::invalid_argument);
}

TEST(Ridge, MatchesNormalEquationsOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ua(-6, 1);
  for (int trial = 0; trial < 20; ++trial) {
    RidgeProblem p;
    p.design = random_matrix(rng, 40 + trial, 6 + trial % 7);
    p.targets = random_matrix(rng, p.design.rows(), 1);
    p.reg_strength = std::pow(10.0, ua(rng));
    const auto sol = ridge_solve(p);
    const auto ref = oracle::ridge_normal_equations(p.design, p.targets, p.reg_strength);
    EXPECT_LT((sol.w - ref).norm(), 1e-8 * std::max(1.0, ref.norm()));
    EXPECT_LE(ridge_stationarity(p, sol.w), 1e-8);
  }
}

TEST(Ridge, UnregularisedRankDeficientGivesMinimumNorm) {
  std::mt19937_64 rng(4);
  RidgeProblem p;
  p.design = random_matrix(rng, 25, 4);
  p.design.col(2) = p.design.col(0);
  p.targets = random_matrix(rng, 25, 1);
  const auto sol = ridge_solve(p);
  EXPECT_TRUE(sol.rank_deficient);
  EXPECT_EQ(sol.rank, 3);
  // duplicated columns share weight equally in the minimum-norm solution
  EXPECT_NEAR(sol.w(0), sol.w(2), 1e-10);
  EXPECT_LE(ridge_stationarity(p, sol.w), 1e-9);
}

TEST(Ridge, ZeroAlphaFullRankIsLeastSquares) {
  std::mt19937_64 rng(5);
  RidgeProblem p;
  p.design = random_matrix(rng, 30, 5);
  p.targets = random_matrix(rng, 30, 1);
  const auto sol = ridge_solve(p);
  const auto ref = oracle::ridge_normal_equations(p.design, p.targets, 0.0);
  EXPECT_LT((sol.w - ref).norm(), 1e-10);
}

TEST(Ridge, WideSystemWithRegularisation) {
  // more unknowns than rows is fine once alpha > 0
  std::mt19937_64 rng(6);
  RidgeProblem p;
  p.design = random_matrix(rng, 5, 12);
  p.targets = random_matrix(rng, 5, 1);
  p.reg_strength = 1e-3;
  const auto sol = ridge_solve(p);
  const auto ref = oracle::ridge_normal_equations(p.design, p.targets, p.reg_strength);
  EXPECT_LT((sol.w - ref).norm(), 1e-8 * ref.norm());
}

// Period-2 cosines and sines on [0, 1] are each complete there, so together
// they are numerically dependent; pivoted QR used to overflow on this.
TEST(Ridge, UnregularisedNearCollinearDesignStaysBounded) {
  const int rows = 120, freqs = 40;
  RidgeProblem p;
  p.design.resize(rows, 2 * freqs);
  Vector w_true = Vector::Zero(2 * freqs);
  w_true(freqs) = 1.0;  // sin(pi x)
  for (int i = 0; i < rows; ++i) {
    const double x = (i + 0.5) / rows;
    for (int n = 1; n <= freqs; ++n) {
      p.design(i, n - 1) = std::cos(n * std::numbers::pi * x);
      p.design(i, freqs + n - 1) = std::sin(n * std::numbers::pi * x);
    }
  }
  p.targets = p.design * w_true;
  const auto sol = ridge_solve(p);
  ASSERT_TRUE(sol.w.allFinite());
  EXPECT_TRUE(sol.rank_deficient);
  EXPECT_LT((p.design * sol.w - p.targets).norm(), 1e-8);
  // minimum norm: no larger than any exact solution
  EXPECT_LE(sol.w.norm(), w_true.norm() * (1 + 1e-8));
}
