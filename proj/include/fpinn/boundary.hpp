#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "fpinn/diffnet.hpp"
#include "fpinn/jet.hpp"
#include "fpinn/linalg.hpp"

namespace fpinn {

enum class DistanceKind { poly, exp };

/// Product-form distance function on an axis-aligned box, zero on every face.
///   poly:  prod_i (x_i - a_i)(b_i - x_i)
///   exp:   prod_i (1 - e^{alpha_a,i (a_i - x_i)}) (1 - e^{alpha_b,i (x_i - b_i)})
struct DistanceFn {
  DistanceKind kind = DistanceKind::poly;
  Vector lower;
  Vector upper;
  Vector alpha_lower;  // exp only
  Vector alpha_upper;  // exp only
  bool trainable = false;

  Eigen::Index dim() const { return lower.size(); }
  /// Steepness parameters in the order [a_0, b_0, a_1, b_1, ...].
  Eigen::Index parameter_count() const { return kind == DistanceKind::exp ? 2 * dim() : 0; }
};

DistanceFn make_poly_distance(const Vector& lower, const Vector& upper);
DistanceFn make_exp_distance(const Vector& lower, const Vector& upper, double alpha, bool trainable);
void validate(const DistanceFn& d);

Jet distance_jet(const DistanceFn& d, const Eigen::VectorXd& point, int order);
JetBatch distance_jets(const DistanceFn& d, const Eigen::MatrixXd& points, int order);

/// d(jet)/d(log alpha_p) for every steepness parameter p, in parameter order.
std::vector<JetBatch> distance_log_alpha_sensitivity(const DistanceFn& d, const Eigen::MatrixXd& points, int order);

Vector log_alpha(const DistanceFn& d);
void set_log_alpha(DistanceFn& d, const Eigen::Ref<const Vector>& log_alpha);

// ---------------------------------------------------------------------------

using PointJetFn = std::function<Jet(const Eigen::VectorXd&)>;

/// Smooth extension of Dirichlet data into the box (value plus derivatives).
struct BoundaryLift {
  std::function<JetBatch(const Eigen::MatrixXd&, int)> eval;
  int max_order = 2;
};

BoundaryLift zero_lift(Eigen::Index dim);
/// 1D: linear interpolation of g(a), g(b).
BoundaryLift linear_lift(double a, double b, const PointJetFn& g);
/// 2D: transfinite (Coons) interpolation of the four face traces of g.
BoundaryLift coons_lift(const Vector& lower, const Vector& upper, const PointJetFn& g);

struct StrongSurrogate {
  BoundaryLift lift;
  DistanceFn distance;
  MlpParams core;
};

/// u = g + phi * u_N by product and sum rules.
JetBatch compose_strong(const JetBatch& lift, const JetBatch& phi, const JetBatch& net);

struct StrongAdjoint {
  JetBatch net_bar;
  JetBatch phi_bar;
};
StrongAdjoint compose_strong_adjoint(const JetBatch& phi, const JetBatch& net, const JetBatch& out_bar);

JetBatch strong_eval(const StrongSurrogate& s, const Eigen::MatrixXd& points, int order);

// ---------------------------------------------------------------------------
// Fourier coefficients of the distance functions on [0, 2 pi].

/// -2 / n^2 for the periodic extension of x (2 pi - x); n != 0.
double phi_hat_poly(int n);
/// Mean term of x (2 pi - x), by quadrature.
double phi_hat_poly_mean();
/// Closed form alpha (1 - e^{2 pi alpha}) e^{-2 pi alpha} / (pi (alpha^2 + n^2)).
double phi_hat_exp(int n, double alpha);

/// (1/L) * periodic trapezoid sum of f(x) e^{-i 2 pi n x / L} over `nodes` points.
std::complex<double> fourier_coefficient_quadrature(const std::function<double(double)>& f, int n, double length,
                                                    int nodes);

double phi_poly_periodic(double x);             // x (2 pi - x)
double phi_exp_periodic(double x, double alpha);  // (1 - e^{-alpha x})(1 - e^{alpha (x - 2 pi)})

}  // namespace fpinn
