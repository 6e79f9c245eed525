#pragma once

#include <complex>
#include <vector>

#include "fpinn/linalg.hpp"

namespace fpinn {

/// ||pred - truth||_2 / ||truth||_2; throws on a zero-norm truth.
double relative_l2(const Vector& pred, const Vector& truth);

/// coeff(k) = sum_n x_n e^{-i 2 pi k n / N}, k = -N/2 .. N/2 - 1.
struct Spectrum {
  int n = 0;
  double length = 0.0;
  std::vector<std::complex<double>> coeffs;  // coeffs[k + N/2]

  int kmin() const { return -n / 2; }
  int kmax() const { return n / 2 - 1; }
  std::complex<double> at(int k) const { return coeffs[static_cast<std::size_t>(k + n / 2)]; }
};

/// Direct O(N^2) summation. N must be even and >= 4.
Spectrum dft(const Vector& samples, double length);
/// Iterative radix-2 path; N must be a power of two.
Spectrum dft_fast(const Vector& samples, double length);
/// dft_fast when N is a power of two, dft otherwise.
Spectrum dft_auto(const Vector& samples, double length);

/// N equispaced samples x_n = n L / N on [0, L).
Vector spectrum_grid(double length, int n);

/// | |model(k)| - |truth(k)| | for k = 0 .. N/2 - 1.
std::vector<double> spectrum_error(const Vector& model, const Vector& truth, double length);

/// sum_{|k| > cutoff} |coeff(k)|^2
double tail_energy(const Spectrum& s, int cutoff);

/// Coefficients indexed n = -h .. h; out-of-range reads are zero.
struct CoeffSeq {
  int h = 0;
  std::vector<std::complex<double>> c;

  CoeffSeq() = default;
  explicit CoeffSeq(int half) : h(half), c(static_cast<std::size_t>(2 * half + 1)) {}
  std::complex<double> at(int k) const {
    return (k < -h || k > h) ? std::complex<double>() : c[static_cast<std::size_t>(k + h)];
  }
  std::complex<double>& operator[](int k) { return c[static_cast<std::size_t>(k + h)]; }
};

/// (phi * un)[k] = sum_m phi[m] un[k - m]
std::complex<double> convolve_at(const CoeffSeq& phi, const CoeffSeq& un, int k);
/// max_{|k| <= h/2} |utheta[k] - (phi * un)[k]| with h the half-width of utheta.
double convolution_check(const CoeffSeq& phi, const CoeffSeq& un, const CoeffSeq& utheta);

/// Fourier-series coefficients (spectrum / N) restricted to |k| <= h.
CoeffSeq series_coefficients(const Spectrum& s, int h);

}  // namespace fpinn
