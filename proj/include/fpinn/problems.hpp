#pragma once

// Benchmark catalog: manufactured solutions on axis-aligned boxes, operators
// split as F[u] = G[u] + S[u] with G linear, collocation sampling.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fpinn/boundary.hpp"
#include "fpinn/jet.hpp"
#include "fpinn/linalg.hpp"

namespace fpinn {

/// G[u] = c0 u + sum_k g_k du/dx_k + sum_k s_k d2u/dx_k^2
struct LinearOperator {
  double value_coeff = 0.0;
  Vector grad_coeffs;
  Vector second_coeffs;

  int required_order() const;
};

enum class NonlinearKind { none, allen_cahn };  // allen_cahn: S[u] = u (u^2 - 1)
enum class BoundaryKind { dirichlet, dirichlet_initial };

/// One face of the box: axis and side (0 = lower, 1 = upper).
struct Face {
  int axis = 0;
  int side = 0;
};

/// Univariate factor with value, first and second derivative.
using UnivariateFn = std::function<std::array<double, 3>(double)>;

/// u(x) = sum_t amp_t prod_axis factor_{t,axis}(x_axis)
struct SeparableTerm {
  double amp = 1.0;
  std::vector<UnivariateFn> factors;
};

struct PdeProblem {
  std::string name;
  Vector lower, upper;
  LinearOperator linear;
  NonlinearKind nonlinear = NonlinearKind::none;
  BoundaryKind boundary = BoundaryKind::dirichlet;
  std::vector<Face> dirichlet_faces;
  std::vector<SeparableTerm> truth;  // also the source of forcing and boundary data

  Eigen::Index dim() const { return lower.size(); }
  int required_order() const { return linear.required_order(); }
  bool has_truth() const { return !truth.empty(); }
  /// True when every box face carries Dirichlet data (strong-BC variants need this).
  bool all_faces_dirichlet() const { return dirichlet_faces.size() == static_cast<std::size_t>(2 * dim()); }
};

struct ProblemParams {
  std::optional<int> k;  // frequency for the sweep cases
};

/// Case names: poisson1d_sweep, allencahn1d_sweep (need k, given either in
/// params or as "poisson1d_sweep(15)"), poisson1d_{single,multi,hybrid},
/// allencahn1d_{single,multi,hybrid}, poisson2d_single, poisson2d_combined,
/// allencahn2d_multi, wave1d, and the analysis cases poisson1d_two_tone,
/// poisson1d_gauss_mod, poisson1d_poly_sine.
PdeProblem make_problem(std::string_view case_name, const ProblemParams& params = {});
const std::vector<std::string>& catalog_names();

// Truth evaluation ----------------------------------------------------------

Jet truth_jet(const PdeProblem& p, const Vector& x);
JetBatch truth_jets(const PdeProblem& p, const Eigen::MatrixXd& points, int order);
Vector truth_values(const PdeProblem& p, const Eigen::MatrixXd& points);

/// f = G[u*] + S[u*] with u* differentiated analytically.
double forcing(const PdeProblem& p, const Vector& x);
Vector forcing_values(const PdeProblem& p, const Eigen::MatrixXd& points);

/// Dirichlet data g (the truth restricted to the box).
double boundary_data(const PdeProblem& p, const Vector& x);
PointJetFn boundary_jet_fn(const PdeProblem& p);

// Operators -----------------------------------------------------------------

struct OperatorParts {
  Vector linear;
  Vector nonlinear;
};

OperatorParts apply_operator(const PdeProblem& p, const JetBatch& u);
std::pair<double, double> apply_operator(const PdeProblem& p, const Jet& u);
/// G applied to a bank of basis jets given as (n x B) value/grad/second blocks.
DenseMatrix apply_linear(const LinearOperator& op, const DenseMatrix& value, const std::vector<DenseMatrix>& grad,
                         const std::vector<DenseMatrix>& second);

double nonlinear_term(NonlinearKind kind, double u);
/// dS/du
double nonlinear_derivative(NonlinearKind kind, double u);

/// (G + S)[u] - f at each point.
Vector residual(const PdeProblem& p, const JetBatch& u, const Vector& forcing);

// Collocation ---------------------------------------------------------------

enum class Scheme { equispaced, uniform_random };

struct CollocationSet {
  DenseMatrix interior;  // N x d
  DenseMatrix boundary;  // M x d
  Vector forcing;        // f at interior points
  Vector boundary_values;
  Scheme scheme = Scheme::equispaced;
  std::uint64_t seed = 0;
};

/// 1D equispaced interior points include both endpoints; 2D interior points
/// form the smallest strictly-interior square lattice holding n_interior,
/// truncated row-major. Boundary points are split evenly across the
/// Dirichlet faces and spaced evenly along each face (corners included).
CollocationSet sample_collocation(const PdeProblem& p, int n_interior, int n_boundary, Scheme scheme,
                                  std::uint64_t seed);

/// Evaluation grid: n points on [a, b] in 1D, a ceil(sqrt(n))^2 lattice
/// including faces in 2D.
DenseMatrix test_grid(const PdeProblem& p, int n);

}  // namespace fpinn
