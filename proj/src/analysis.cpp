#include "fpinn/analysis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fpinn {

namespace {

using cd = std::complex<double>;

void check_length(Eigen::Index n) {
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("dft: N must be even and >= 4");
}

bool power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

// Places the natural-order DFT X[0..N) into the centred layout.
Spectrum centred(const std::vector<cd>& x, double length) {
  Spectrum s;
  s.n = static_cast<int>(x.size());
  s.length = length;
  s.coeffs.resize(x.size());
  const int n = s.n;
  for (int k = -n / 2; k < n / 2; ++k) s.coeffs[static_cast<std::size_t>(k + n / 2)] = x[static_cast<std::size_t>((k + n) % n)];
  return s;
}

}  // namespace

double relative_l2(const Vector& pred, const Vector& truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("relative_l2: length mismatch");
  const double t = truth.norm();
  if (!(t > 0.0)) throw std::invalid_argument("relative_l2: truth has zero norm");
  return (pred - truth).norm() / t;
}

Spectrum dft(const Vector& samples, double length) {
  const Eigen::Index n = samples.size();
  check_length(n);
  std::vector<cd> tw(static_cast<std::size_t>(n));
  for (Eigen::Index m = 0; m < n; ++m)
    tw[static_cast<std::size_t>(m)] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(m) / n);
  std::vector<cd> x(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    cd acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) acc += samples(j) * tw[static_cast<std::size_t>((k * j) % n)];
    x[static_cast<std::size_t>(k)] = acc;
  }
  return centred(x, length);
}

Spectrum dft_fast(const Vector& samples, double length) {
  const Eigen::Index n = samples.size();
  check_length(n);
  if (!power_of_two(n)) throw std::invalid_argument("dft_fast: N must be a power of two");
  std::vector<cd> a(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = samples(i);
  // bit reversal
  for (Eigen::Index i = 1, j = 0; i < n; ++i) {
    Eigen::Index bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(j)]);
  }
  for (Eigen::Index len = 2; len <= n; len <<= 1) {
    const Eigen::Index half = len / 2;
    std::vector<cd> w(static_cast<std::size_t>(half));
    for (Eigen::Index m = 0; m < half; ++m)
      w[static_cast<std::size_t>(m)] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(m) / len);
    for (Eigen::Index i = 0; i < n; i += len)
      for (Eigen::Index m = 0; m < half; ++m) {
        const cd u = a[static_cast<std::size_t>(i + m)];
        const cd v = a[static_cast<std::size_t>(i + m + half)] * w[static_cast<std::size_t>(m)];
        a[static_cast<std::size_t>(i + m)] = u + v;
        a[static_cast<std::size_t>(i + m + half)] = u - v;
      }
  }
  return centred(a, length);
}

Spectrum dft_auto(const Vector& samples, double length) {
  return power_of_two(samples.size()) ? dft_fast(samples, length) : dft(samples, length);
}

Vector spectrum_grid(double length, int n) {
  Vector x(n);
  for (int i = 0; i < n; ++i) x(i) = length * i / n;
  return x;
}

std::vector<double> spectrum_error(const Vector& model, const Vector& truth, double length) {
  if (model.size() != truth.size()) throw std::invalid_argument("spectrum_error: grids differ");
  const Spectrum m = dft_auto(model, length), t = dft_auto(truth, length);
  std::vector<double> out(static_cast<std::size_t>(m.n / 2));
  for (int k = 0; k < m.n / 2; ++k) out[static_cast<std::size_t>(k)] = std::abs(std::abs(m.at(k)) - std::abs(t.at(k)));
  return out;
}

double tail_energy(const Spectrum& s, int cutoff) {
  double e = 0.0;
  for (int k = s.kmin(); k <= s.kmax(); ++k)
    if (std::abs(k) > cutoff) e += std::norm(s.at(k));
  return e;
}

std::complex<double> convolve_at(const CoeffSeq& phi, const CoeffSeq& un, int k) {
  cd acc = 0.0;
  for (int m = -phi.h; m <= phi.h; ++m) acc += phi.at(m) * un.at(k - m);
  return acc;
}

double convolution_check(const CoeffSeq& phi, const CoeffSeq& un, const CoeffSeq& utheta) {
  double worst = 0.0;
  for (int k = -utheta.h / 2; k <= utheta.h / 2; ++k)
    worst = std::max(worst, std::abs(utheta.at(k) - convolve_at(phi, un, k)));
  return worst;
}

CoeffSeq series_coefficients(const Spectrum& s, int h) {
  if (h > s.kmax()) throw std::invalid_argument("series_coefficients: band exceeds the spectrum");
  CoeffSeq out(h);
  for (int k = -h; k <= h; ++k) out[k] = s.at(k) / static_cast<double>(s.n);
  return out;
}

}  // namespace fpinn
