#include "fpinn/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace fpinn {

namespace {

void require_finite(const DenseMatrix& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + " has non-finite entries");
}

Eigen::Index diagonal_rank(const DenseMatrix& r, double tol) {
  const Eigen::Index n = std::min(r.rows(), r.cols());
  if (n == 0) return 0;
  const double scale = r.diagonal().head(n).cwiseAbs().maxCoeff();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(r(i, i)) > tol * scale) ++rank;
  return rank;
}

}  // namespace

QrResult qr_decompose(const DenseMatrix& a, double rank_tol) {
  if (a.rows() < a.cols()) throw std::invalid_argument("qr_decompose: rows < cols");
  require_finite(a, "qr_decompose input");

  Eigen::HouseholderQR<DenseMatrix> qr(a);
  QrResult out;
  const Eigen::Index n = a.cols();
  out.q = qr.householderQ() * DenseMatrix::Identity(a.rows(), n);
  out.r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  out.rank = diagonal_rank(out.r, rank_tol);
  out.rank_deficient = out.rank < n;
  return out;
}

RidgeSolution ridge_solve(const RidgeProblem& p) {
  const auto& a = p.design;
  if (p.targets.size() != a.rows()) throw std::invalid_argument("ridge_solve: targets length != design rows");
  if (!(p.reg_strength >= 0.0) || !std::isfinite(p.reg_strength))
    throw std::invalid_argument("ridge_solve: reg_strength must be finite and >= 0");
  require_finite(a, "ridge_solve design");
  if (!p.targets.allFinite()) throw std::invalid_argument("ridge_solve targets has non-finite entries");

  const Eigen::Index n = a.rows();
  const Eigen::Index cols = a.cols();
  RidgeSolution out;
  if (cols == 0) return out;

  if (p.reg_strength > 0.0) {
    DenseMatrix stacked(n + cols, cols);
    stacked.topRows(n) = a;
    stacked.bottomRows(cols) = std::sqrt(p.reg_strength) * DenseMatrix::Identity(cols, cols);
    Vector rhs = Vector::Zero(n + cols);
    rhs.head(n) = p.targets;
    Eigen::HouseholderQR<DenseMatrix> qr(stacked);
    out.w = qr.solve(rhs);
    out.rank = cols;
    return out;
  }

  if (n >= cols) {
    Eigen::HouseholderQR<DenseMatrix> qr(a);
    const DenseMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    out.rank = diagonal_rank(r, 1e-12);
    if (out.rank == cols) {
      out.w = qr.solve(p.targets);
      return out;
    }
  }
  // Rank-deficient (or underdetermined) without regularization. Pivoted QR
  // misjudges the rank of near-collinear tensor designs and its triangular
  // solve then overflows, so the minimum-norm solution goes through the SVD.
  Eigen::BDCSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  out.w = svd.solve(p.targets);
  out.rank = svd.rank();
  out.rank_deficient = true;
  return out;
}

double ridge_stationarity(const RidgeProblem& p, const Vector& w) {
  const Vector g = p.design.transpose() * (p.design * w - p.targets) + p.reg_strength * w;
  return g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace fpinn
