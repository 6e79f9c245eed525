#include "fpinn/problems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace fpinn {

namespace {

constexpr double pi = std::numbers::pi;

UnivariateFn sin_f(double w) {
  return [w](double x) -> std::array<double, 3> {
    const double s = std::sin(w * x), c = std::cos(w * x);
    return {s, w * c, -w * w * s};
  };
}

UnivariateFn cos_f(double w) {
  return [w](double x) -> std::array<double, 3> {
    const double s = std::sin(w * x), c = std::cos(w * x);
    return {c, -w * s, -w * w * c};
  };
}

UnivariateFn one_f() {
  return [](double) -> std::array<double, 3> { return {1.0, 0.0, 0.0}; };
}

UnivariateFn square_f() {
  return [](double x) -> std::array<double, 3> { return {x * x, 2.0 * x, 2.0}; };
}

// e^{-x^2/2} sin(w x)
UnivariateFn gauss_sin_f(double w) {
  return [w](double x) -> std::array<double, 3> {
    const double g = std::exp(-0.5 * x * x), g1 = -x * g, g2 = (x * x - 1.0) * g;
    const double s = std::sin(w * x), s1 = w * std::cos(w * x), s2 = -w * w * s;
    return {g * s, g1 * s + g * s1, g2 * s + 2.0 * g1 * s1 + g * s2};
  };
}

SeparableTerm term(double amp, std::vector<UnivariateFn> f) { return {amp, std::move(f)}; }

LinearOperator laplacian(int dim) {
  LinearOperator op;
  op.grad_coeffs = Vector::Zero(dim);
  op.second_coeffs = Vector::Ones(dim);
  return op;
}

PdeProblem box_problem(std::string name, int dim, double a, double b) {
  PdeProblem p;
  p.name = std::move(name);
  p.lower = Vector::Constant(dim, a);
  p.upper = Vector::Constant(dim, b);
  p.linear = laplacian(dim);
  for (int axis = 0; axis < dim; ++axis) {
    p.dirichlet_faces.push_back({axis, 0});
    p.dirichlet_faces.push_back({axis, 1});
  }
  return p;
}

std::vector<SeparableTerm> truth_single() { return {term(1.0, {sin_f(100)})}; }
std::vector<SeparableTerm> truth_multi() {
  return {term(1.0, {sin_f(1)}), term(0.1, {sin_f(20)}), term(0.05, {cos_f(100)})};
}
std::vector<SeparableTerm> truth_hybrid() {
  return {term(1.0, {[](double x) -> std::array<double, 3> {
            const auto s = sin_f(6)(x), c = cos_f(100)(x);
            return {s[0] * c[0], s[1] * c[0] + s[0] * c[1], s[2] * c[0] + 2.0 * s[1] * c[1] + s[0] * c[2]};
          }})};
}

// "name(k)" -> ("name", k)
std::pair<std::string, std::optional<int>> split_case(std::string_view s) {
  const auto open = s.find('(');
  if (open == std::string_view::npos) return {std::string(s), std::nullopt};
  if (s.back() != ')') throw std::invalid_argument("make_problem: malformed case '" + std::string(s) + "'");
  int k = 0;
  const auto digits = s.substr(open + 1, s.size() - open - 2);
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
  if (ec != std::errc() || ptr != digits.data() + digits.size())
    throw std::invalid_argument("make_problem: malformed frequency in '" + std::string(s) + "'");
  return {std::string(s.substr(0, open)), k};
}

std::string known_cases() {
  std::string out;
  for (const auto& n : catalog_names()) out += (out.empty() ? "" : ", ") + n;
  return out;
}

}  // namespace

int LinearOperator::required_order() const {
  if (second_coeffs.size() && (second_coeffs.array() != 0).any()) return 2;
  if (grad_coeffs.size() && (grad_coeffs.array() != 0).any()) return 1;
  return 0;
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {
      "poisson1d_sweep",     "allencahn1d_sweep",  "poisson1d_single",    "poisson1d_multi",
      "poisson1d_hybrid",    "allencahn1d_single", "allencahn1d_multi",   "allencahn1d_hybrid",
      "poisson2d_single",    "poisson2d_combined", "allencahn2d_multi",   "wave1d",
      "poisson1d_two_tone",  "poisson1d_gauss_mod", "poisson1d_poly_sine"};
  return names;
}

PdeProblem make_problem(std::string_view case_name, const ProblemParams& params) {
  auto [name, k_inline] = split_case(case_name);
  const std::optional<int> k = k_inline ? k_inline : params.k;
  const double L = 2.0 * pi;

  auto sweep_k = [&]() {
    if (!k || *k < 1) throw std::invalid_argument("make_problem: " + name + " needs a frequency k >= 1");
    return static_cast<double>(*k);
  };

  if (name == "poisson1d_sweep" || name == "allencahn1d_sweep") {
    const double kk = sweep_k();
    PdeProblem p = box_problem(name + "(" + std::to_string(*k) + ")", 1, 0.0, L);
    p.truth = {term(1.0, {sin_f(kk)})};
    if (name[0] == 'a') p.nonlinear = NonlinearKind::allen_cahn;
    return p;
  }
  if (name == "poisson1d_single" || name == "allencahn1d_single" || name == "poisson1d_multi" ||
      name == "allencahn1d_multi" || name == "poisson1d_hybrid" || name == "allencahn1d_hybrid") {
    PdeProblem p = box_problem(name, 1, 0.0, L);
    if (name.ends_with("single")) p.truth = truth_single();
    if (name.ends_with("multi")) p.truth = truth_multi();
    if (name.ends_with("hybrid")) p.truth = truth_hybrid();
    if (name[0] == 'a') p.nonlinear = NonlinearKind::allen_cahn;
    return p;
  }
  if (name == "poisson1d_two_tone") {
    PdeProblem p = box_problem(name, 1, 0.0, L);
    p.truth = {term(1.0, {sin_f(2)}), term(1.0, {sin_f(16)})};
    return p;
  }
  if (name == "poisson1d_gauss_mod") {
    PdeProblem p = box_problem(name, 1, 0.0, L);
    p.truth = {term(1.0, {gauss_sin_f(16)})};
    return p;
  }
  if (name == "poisson1d_poly_sine") {
    PdeProblem p = box_problem(name, 1, 0.0, L);
    p.truth = {term(1.0, {square_f()}), term(1.0, {sin_f(16)})};
    return p;
  }
  if (name == "poisson2d_single") {
    PdeProblem p = box_problem(name, 2, 0.0, L);
    p.truth = {term(1.0, {sin_f(100), sin_f(100)})};
    return p;
  }
  if (name == "poisson2d_combined") {
    PdeProblem p = box_problem(name, 2, 0.0, L);
    auto sc = [](double x) -> std::array<double, 3> {
      const auto s = sin_f(6)(x), c = cos_f(20)(x);
      return {s[0] * c[0], s[1] * c[0] + s[0] * c[1], s[2] * c[0] + 2.0 * s[1] * c[1] + s[0] * c[2]};
    };
    p.truth = {term(1.0, {sc, one_f()}), term(1.0, {one_f(), sc})};
    return p;
  }
  if (name == "allencahn2d_multi") {
    PdeProblem p = box_problem(name, 2, 0.0, L);
    p.nonlinear = NonlinearKind::allen_cahn;
    // (sin x + 0.1 sin 20x + cos 100x)(same in y), expanded into 9 products
    const std::vector<std::pair<double, UnivariateFn>> f = {{1.0, sin_f(1)}, {0.1, sin_f(20)}, {1.0, cos_f(100)}};
    for (const auto& [ax, fx] : f)
      for (const auto& [ay, fy] : f) p.truth.push_back(term(ax * ay, {fx, fy}));
    return p;
  }
  if (name == "wave1d") {
    // coordinates (x, t) on [0, 1]^2; u_t + 10 u_x = v
    PdeProblem p = box_problem(name, 2, 0.0, 1.0);
    p.linear.grad_coeffs = Eigen::Vector2d(10.0, 1.0);
    p.linear.second_coeffs = Vector::Zero(2);
    p.boundary = BoundaryKind::dirichlet_initial;
    p.dirichlet_faces = {{0, 0}, {0, 1}, {1, 0}};
    p.truth = {term(1.0, {sin_f(pi), cos_f(10 * pi)}), term(1.0, {sin_f(2 * pi), cos_f(20 * pi)})};
    return p;
  }
  throw std::invalid_argument("make_problem: unknown case '" + std::string(case_name) + "'; valid cases: " +
                              known_cases());
}

// ---------------------------------------------------------------------------

JetBatch truth_jets(const PdeProblem& p, const Eigen::MatrixXd& points, int order) {
  if (points.cols() != p.dim()) throw std::invalid_argument("truth_jets: point dimension mismatch");
  const Eigen::Index d = p.dim();
  JetBatch out(points.rows(), d, order);
  std::vector<std::array<double, 3>> f(static_cast<std::size_t>(d));
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    for (const auto& t : p.truth) {
      double prod = t.amp;
      for (Eigen::Index i = 0; i < d; ++i) {
        f[static_cast<std::size_t>(i)] = t.factors[static_cast<std::size_t>(i)](points(r, i));
        prod *= f[static_cast<std::size_t>(i)][0];
      }
      out.value(r) += prod;
      for (Eigen::Index k = 0; k < d && order >= 1; ++k) {
        double others = t.amp;
        for (Eigen::Index i = 0; i < d; ++i)
          if (i != k) others *= f[static_cast<std::size_t>(i)][0];
        out.grad(r, k) += others * f[static_cast<std::size_t>(k)][1];
        if (order >= 2) out.second(r, k) += others * f[static_cast<std::size_t>(k)][2];
      }
    }
  }
  return out;
}

Jet truth_jet(const PdeProblem& p, const Vector& x) { return truth_jets(p, x.transpose(), 2).at(0); }

Vector truth_values(const PdeProblem& p, const Eigen::MatrixXd& points) { return truth_jets(p, points, 0).value; }

double forcing(const PdeProblem& p, const Vector& x) {
  const auto [g, s] = apply_operator(p, truth_jet(p, x));
  return g + s;
}

Vector forcing_values(const PdeProblem& p, const Eigen::MatrixXd& points) {
  const auto parts = apply_operator(p, truth_jets(p, points, p.required_order()));
  return parts.linear + parts.nonlinear;
}

double boundary_data(const PdeProblem& p, const Vector& x) { return truth_values(p, x.transpose())(0); }

PointJetFn boundary_jet_fn(const PdeProblem& p) {
  return [p](const Eigen::VectorXd& x) { return truth_jet(p, x); };
}

// ---------------------------------------------------------------------------

double nonlinear_term(NonlinearKind kind, double u) { return kind == NonlinearKind::allen_cahn ? u * (u * u - 1.0) : 0.0; }

double nonlinear_derivative(NonlinearKind kind, double u) {
  return kind == NonlinearKind::allen_cahn ? 3.0 * u * u - 1.0 : 0.0;
}

OperatorParts apply_operator(const PdeProblem& p, const JetBatch& u) {
  const auto& op = p.linear;
  const int need = op.required_order();
  if (u.order() < need) throw std::invalid_argument("apply_operator: jet lacks derivative order " + std::to_string(need));
  OperatorParts out;
  out.linear = op.value_coeff * u.value;
  for (Eigen::Index k = 0; k < op.grad_coeffs.size(); ++k)
    if (op.grad_coeffs(k) != 0.0) out.linear += op.grad_coeffs(k) * u.grad.col(k);
  for (Eigen::Index k = 0; k < op.second_coeffs.size(); ++k)
    if (op.second_coeffs(k) != 0.0) out.linear += op.second_coeffs(k) * u.second.col(k);
  out.nonlinear = u.value.unaryExpr([&](double v) { return nonlinear_term(p.nonlinear, v); });
  return out;
}

std::pair<double, double> apply_operator(const PdeProblem& p, const Jet& u) {
  JetBatch b(1, p.dim(), 2);
  b.value(0) = u.value;
  if (u.grad.size()) b.grad.row(0) = u.grad.transpose();
  if (u.pure_second.size()) b.second.row(0) = u.pure_second.transpose();
  const auto parts = apply_operator(p, b);
  return {parts.linear(0), parts.nonlinear(0)};
}

DenseMatrix apply_linear(const LinearOperator& op, const DenseMatrix& value, const std::vector<DenseMatrix>& grad,
                         const std::vector<DenseMatrix>& second) {
  DenseMatrix out = op.value_coeff * value;
  for (Eigen::Index k = 0; k < op.grad_coeffs.size(); ++k)
    if (op.grad_coeffs(k) != 0.0) out += op.grad_coeffs(k) * grad.at(static_cast<std::size_t>(k));
  for (Eigen::Index k = 0; k < op.second_coeffs.size(); ++k)
    if (op.second_coeffs(k) != 0.0) out += op.second_coeffs(k) * second.at(static_cast<std::size_t>(k));
  return out;
}

Vector residual(const PdeProblem& p, const JetBatch& u, const Vector& f) {
  const auto parts = apply_operator(p, u);
  return parts.linear + parts.nonlinear - f;
}

// ---------------------------------------------------------------------------

namespace {

Vector linspace(double a, double b, Eigen::Index n) {
  if (n == 1) return Vector::Constant(1, 0.5 * (a + b));
  return Vector::LinSpaced(n, a, b);
}

}  // namespace

CollocationSet sample_collocation(const PdeProblem& p, int n_interior, int n_boundary, Scheme scheme,
                                  std::uint64_t seed) {
  if (n_interior < 1 || n_boundary < 1) throw std::invalid_argument("sample_collocation: counts must be >= 1");
  const Eigen::Index d = p.dim();
  CollocationSet c;
  c.scheme = scheme;
  c.seed = seed;
  c.interior.resize(n_interior, d);

  if (scheme == Scheme::uniform_random) {
    std::mt19937_64 rng(seed);
    for (Eigen::Index r = 0; r < n_interior; ++r)
      for (Eigen::Index i = 0; i < d; ++i) {
        std::uniform_real_distribution<double> u(p.lower(i), p.upper(i));
        double v = u(rng);
        while (v <= p.lower(i)) v = u(rng);
        c.interior(r, i) = v;
      }
  } else if (d == 1) {
    c.interior.col(0) = linspace(p.lower(0), p.upper(0), n_interior);
  } else {
    const auto side = static_cast<Eigen::Index>(std::ceil(std::sqrt(static_cast<double>(n_interior)) - 1e-12));
    Vector ax[2];
    for (int i = 0; i < 2; ++i) {
      const double h = (p.upper(i) - p.lower(i)) / static_cast<double>(side + 1);
      ax[i] = Vector::LinSpaced(side, p.lower(i) + h, p.upper(i) - h);
    }
    // row-major: x_1 varies slowest
    for (Eigen::Index r = 0; r < n_interior; ++r) {
      c.interior(r, 0) = ax[0](r / side);
      c.interior(r, 1) = ax[1](r % side);
    }
  }

  const auto faces = static_cast<int>(p.dirichlet_faces.size());
  std::vector<Eigen::RowVectorXd> bpts;
  for (int fi = 0; fi < faces; ++fi) {
    const Face f = p.dirichlet_faces[static_cast<std::size_t>(fi)];
    const double coord = f.side == 0 ? p.lower(f.axis) : p.upper(f.axis);
    if (d == 1) {
      bpts.push_back(Eigen::RowVectorXd::Constant(1, coord));
      continue;
    }
    const int count = std::max(1, n_boundary / faces + (fi < n_boundary % faces ? 1 : 0));
    const int other = 1 - f.axis;
    const Vector t = linspace(p.lower(other), p.upper(other), count);
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      Eigen::RowVectorXd pt(2);
      pt(f.axis) = coord;
      pt(other) = t(j);
      bpts.push_back(pt);
    }
  }
  c.boundary.resize(static_cast<Eigen::Index>(bpts.size()), d);
  for (std::size_t i = 0; i < bpts.size(); ++i) c.boundary.row(static_cast<Eigen::Index>(i)) = bpts[i];

  c.forcing = forcing_values(p, c.interior);
  c.boundary_values = truth_values(p, c.boundary);
  return c;
}

DenseMatrix test_grid(const PdeProblem& p, int n) {
  if (n < 2) throw std::invalid_argument("test_grid: need >= 2 points");
  if (p.dim() == 1) return linspace(p.lower(0), p.upper(0), n);
  const auto side = static_cast<Eigen::Index>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-12));
  const Vector x = linspace(p.lower(0), p.upper(0), side), y = linspace(p.lower(1), p.upper(1), side);
  DenseMatrix g(side * side, 2);
  for (Eigen::Index i = 0; i < side; ++i)
    for (Eigen::Index j = 0; j < side; ++j) {
      g(i * side + j, 0) = x(i);
      g(i * side + j, 1) = y(j);
    }
  return g;
}

}  // namespace fpinn
