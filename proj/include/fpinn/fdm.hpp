#pragma once

#include "fpinn/linalg.hpp"
#include "fpinn/problems.hpp"

namespace fpinn {

/// n equispaced nodes on [a, b], endpoints included.
struct Grid1D {
  int n = 0;
  double a = 0.0, b = 0.0;

  double h() const { return (b - a) / (n - 1); }
  Vector nodes() const { return Vector::LinSpaced(n, a, b); }
};

Grid1D make_grid(const PdeProblem& p, int n);

/// Solves l_i x_{i-1} + d_i x_i + u_i x_{i+1} = r_i.
/// `lower`, `diag`, `upper` have the length of `rhs`; lower(0) and upper(n-1) are ignored.
Vector thomas_solve(Vector lower, Vector diag, Vector upper, Vector rhs);

/// (u_{i-1} - 2 u_i + u_{i+1}) / h^2 = f(x_i), Dirichlet endpoints pinned.
Vector fdm_poisson(const PdeProblem& p, const Grid1D& g);

struct NewtonSettings {
  int max_iters = 100;
  double tol = 1e-10;  // residual infinity norm
};

struct FdmResult {
  Vector u;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  bool used_fallback_start = false;
};

/// Newton on the discrete Allen-Cahn system from a zero start; retried from
/// the Poisson solution when the first attempt does not converge.
FdmResult fdm_allen_cahn(const PdeProblem& p, const Grid1D& g, const NewtonSettings& s = {});

/// Discrete residual of the interior equations for either operator.
Vector fdm_residual(const PdeProblem& p, const Grid1D& g, const Vector& u);

/// Dispatches on the problem's nonlinearity.
FdmResult fdm_solve(const PdeProblem& p, const Grid1D& g);

}  // namespace fpinn
