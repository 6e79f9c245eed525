#pragma once

#include <Eigen/Dense>

namespace fpinn {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Thin Householder factorization A = Q R with Q (m x n) orthonormal columns.
struct QrResult {
  DenseMatrix q;
  DenseMatrix r;
  Eigen::Index rank = 0;
  bool rank_deficient = false;
};

/// Rows must be >= cols and every entry finite. Rank is counted from |R_ii|
/// relative to the largest diagonal entry; a deficient rank is flagged, not thrown.
QrResult qr_decompose(const DenseMatrix& a, double rank_tol = 1e-12);

struct RidgeProblem {
  DenseMatrix design;  // N x P
  Vector targets;      // N
  double reg_strength = 0.0;
};

struct RidgeSolution {
  Vector w;
  // Set when reg_strength == 0 and the design lost rank; w is then the
  // minimum-norm least-squares solution.
  bool rank_deficient = false;
  Eigen::Index rank = 0;
};

/// argmin ||A w - y||^2 + alpha ||w||^2 via QR of the stacked system [A; sqrt(alpha) I].
RidgeSolution ridge_solve(const RidgeProblem& p);

/// ||A^T (A w - y) + alpha w||_inf
double ridge_stationarity(const RidgeProblem& p, const Vector& w);

}  // namespace fpinn
