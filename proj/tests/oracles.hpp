#pragma once

// Independent reference computations for tests: nothing here calls into the
// library's own solvers or transforms.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Gaussian elimination with partial pivoting, long double accumulation.
inline Vec gauss_solve(const Mat& a_in, const Vec& b_in) {
  const Eigen::Index n = a_in.rows();
  std::vector<std::vector<long double>> a(n, std::vector<long double>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a[i][j] = a_in(i, j);
    a[i][n] = b_in(i);
  }
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = c;
    for (Eigen::Index r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    if (a[piv][c] == 0) throw std::runtime_error("gauss_solve: singular");
    std::swap(a[c], a[piv]);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const long double f = a[r][c] / a[c][c];
      for (Eigen::Index j = c; j <= n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  Vec x(n);
  for (Eigen::Index i = n; i-- > 0;) {
    long double s = a[i][n];
    for (Eigen::Index j = i + 1; j < n; ++j) s -= a[i][j] * x(j);
    x(i) = static_cast<double>(s / a[i][i]);
  }
  return x;
}

// (A^T A + alpha I) w = A^T y
inline Vec ridge_normal_equations(const Mat& a, const Vec& y, double alpha) {
  Mat g = a.transpose() * a;
  g.diagonal().array() += alpha;
  return gauss_solve(g, a.transpose() * y);
}

// X_k = sum_n x_n e^{-2 pi i k n / N}, k = -N/2 .. N/2-1 (index k + N/2).
inline std::vector<std::complex<double>> brute_dft(const Vec& x) {
  const long n = x.size();
  std::vector<std::complex<double>> out(n);
  for (long k = -n / 2; k < n / 2; ++k) {
    long double re = 0, im = 0;
    for (long j = 0; j < n; ++j) {
      // reduce k*j mod n first so the angle stays small
      const long m = ((k * j) % n + n) % n;
      const long double ang = -2.0L * std::numbers::pi_v<long double> * m / n;
      re += x(j) * std::cos(ang);
      im += x(j) * std::sin(ang);
    }
    out[k + n / 2] = {static_cast<double>(re), static_cast<double>(im)};
  }
  return out;
}

inline double d1(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

inline double d2(const std::function<double(double)>& f, double x, double h = 1e-4) {
  return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
}

// Fourth-order stencils, for analytic bases where tighter agreement is needed.
inline double d1_4(const std::function<double(double)>& f, double x, double h = 1e-3) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

inline double d2_4(const std::function<double(double)>& f, double x, double h = 1e-2) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

// Eighth-order stencils: truncation (wh)^8 stays below 1e-9 for w h < 0.07.
inline double d1_8(const std::function<double(double)>& f, double x, double h) {
  static constexpr double c[] = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
  double s = 0;
  for (int i = 0; i < 4; ++i) s += c[i] * (f(x + (i + 1) * h) - f(x - (i + 1) * h));
  return s / h;
}

inline double d2_8(const std::function<double(double)>& f, double x, double h) {
  static constexpr double c[] = {8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};
  double s = -205.0 / 72 * f(x);
  for (int i = 0; i < 4; ++i) s += c[i] * (f(x + (i + 1) * h) + f(x - (i + 1) * h));
  return s / (h * h);
}

// |a - b| / max(|b|, floor)
inline double rel(double a, double b, double floor = 1.0) { return std::fabs(a - b) / std::max(std::fabs(b), floor); }

// Type-7 quantile by direct definition, for cross-checking summaries.
inline double q7(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (v.size() - 1) * p;
  const double lo = std::floor(h), hi = std::ceil(h);
  return v[static_cast<std::size_t>(lo)] + (h - lo) * (v[static_cast<std::size_t>(hi)] - v[static_cast<std::size_t>(lo)]);
}

}  // namespace oracle
