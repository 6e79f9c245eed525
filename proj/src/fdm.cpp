#include "fpinn/fdm.hpp"

#include <stdexcept>

namespace fpinn {

namespace {

void require_1d_laplacian(const PdeProblem& p) {
  if (p.dim() != 1 || p.linear.required_order() != 2 || p.linear.value_coeff != 0.0 || p.linear.grad_coeffs(0) != 0.0 ||
      p.linear.second_coeffs(0) != 1.0)
    throw std::invalid_argument("fdm: only 1D u_xx (+ S[u]) problems are supported");
}

Vector interior_forcing(const PdeProblem& p, const Grid1D& g) {
  return forcing_values(p, g.nodes());
}

}  // namespace

Grid1D make_grid(const PdeProblem& p, int n) {
  if (n < 3) throw std::invalid_argument("make_grid: need at least 3 nodes");
  return {n, p.lower(0), p.upper(0)};
}

Vector thomas_solve(Vector lower, Vector diag, Vector upper, Vector rhs) {
  const Eigen::Index n = diag.size();
  for (Eigen::Index i = 1; i < n; ++i) {
    const double w = lower(i) / diag(i - 1);
    diag(i) -= w * upper(i - 1);
    rhs(i) -= w * rhs(i - 1);
  }
  Vector x(n);
  x(n - 1) = rhs(n - 1) / diag(n - 1);
  for (Eigen::Index i = n - 1; i-- > 0;) x(i) = (rhs(i) - upper(i) * x(i + 1)) / diag(i);
  return x;
}

Vector fdm_residual(const PdeProblem& p, const Grid1D& g, const Vector& u) {
  const Vector f = interior_forcing(p, g);
  const double ih2 = 1.0 / (g.h() * g.h());
  Vector r = Vector::Zero(g.n);
  for (int i = 1; i < g.n - 1; ++i)
    r(i) = (u(i - 1) - 2.0 * u(i) + u(i + 1)) * ih2 + nonlinear_term(p.nonlinear, u(i)) - f(i);
  return r;
}

Vector fdm_poisson(const PdeProblem& p, const Grid1D& g) {
  require_1d_laplacian(p);
  const int n = g.n;
  const double ih2 = 1.0 / (g.h() * g.h());
  const Vector f = interior_forcing(p, g);
  Vector lo = Vector::Constant(n, ih2), di = Vector::Constant(n, -2.0 * ih2), up = Vector::Constant(n, ih2);
  Vector rhs = f;
  // pinned boundary rows
  di(0) = di(n - 1) = 1.0;
  up(0) = lo(n - 1) = 0.0;
  rhs(0) = boundary_data(p, Vector::Constant(1, g.a));
  rhs(n - 1) = boundary_data(p, Vector::Constant(1, g.b));
  return thomas_solve(lo, di, up, rhs);
}

namespace {

FdmResult newton(const PdeProblem& p, const Grid1D& g, Vector u, const NewtonSettings& s) {
  const int n = g.n;
  const double ih2 = 1.0 / (g.h() * g.h());
  u(0) = boundary_data(p, Vector::Constant(1, g.a));
  u(n - 1) = boundary_data(p, Vector::Constant(1, g.b));
  FdmResult out;
  for (int it = 0; it <= s.max_iters; ++it) {
    const Vector r = fdm_residual(p, g, u);
    out.residual = r.lpNorm<Eigen::Infinity>();
    out.iterations = it;
    if (!std::isfinite(out.residual)) break;
    if (out.residual <= s.tol) {
      out.converged = true;
      break;
    }
    if (it == s.max_iters) break;
    Vector lo = Vector::Constant(n, ih2), up = Vector::Constant(n, ih2), di(n), rhs = -r;
    for (int i = 0; i < n; ++i) di(i) = -2.0 * ih2 + nonlinear_derivative(p.nonlinear, u(i));
    di(0) = di(n - 1) = 1.0;
    up(0) = lo(n - 1) = 0.0;
    rhs(0) = rhs(n - 1) = 0.0;
    u += thomas_solve(lo, di, up, rhs);
  }
  out.u = std::move(u);
  return out;
}

}  // namespace

FdmResult fdm_allen_cahn(const PdeProblem& p, const Grid1D& g, const NewtonSettings& s) {
  require_1d_laplacian(p);
  FdmResult r = newton(p, g, Vector::Zero(g.n), s);
  if (!r.converged) {
    r = newton(p, g, fdm_poisson(p, g), s);
    r.used_fallback_start = true;
  }
  return r;
}

FdmResult fdm_solve(const PdeProblem& p, const Grid1D& g) {
  if (p.nonlinear == NonlinearKind::none) {
    FdmResult r;
    r.u = fdm_poisson(p, g);
    r.residual = fdm_residual(p, g, r.u).lpNorm<Eigen::Infinity>();
    r.converged = true;
    return r;
  }
  return fdm_allen_cahn(p, g);
}

}  // namespace fpinn
