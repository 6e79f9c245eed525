#include "fpinn/diffnet.hpp"

#include <cmath>
#include <random>

namespace fpinn {

MlpParams init_params(std::span<const int> widths, std::uint64_t seed, Activation activation) {
  if (widths.size() < 2) throw std::invalid_argument("init_params: need at least input and output widths");
  for (int w : widths)
    if (w <= 0) throw std::invalid_argument("init_params: widths must be positive");
  if (widths.back() != 1) throw std::invalid_argument("init_params: scalar output required");

  std::mt19937_64 rng(seed);
  auto glorot = [&rng](int fan_in, int fan_out) {
    const double s = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-s, s);
    DenseMatrix m(fan_out, fan_in);
    // fixed fill order so the draw sequence is independent of storage order
    for (int i = 0; i < fan_out; ++i)
      for (int j = 0; j < fan_in; ++j) m(i, j) = dist(rng);
    return m;
  };

  MlpParams p;
  p.activation = activation;
  const std::size_t hidden = widths.size() - 2;
  for (std::size_t l = 0; l < hidden; ++l) {
    p.weights.push_back(glorot(widths[l], widths[l + 1]));
    p.biases.push_back(Vector::Zero(widths[l + 1]));
  }
  const int last = widths[widths.size() - 2];
  if (hidden == 0) throw std::invalid_argument("init_params: at least one hidden layer required");
  p.coeffs = glorot(last, 1).row(0).transpose();
  if (activation == Activation::adaptive_tanh) p.slopes = Vector::Ones(static_cast<Eigen::Index>(hidden));
  return p;
}

void validate(const MlpParams& p) {
  if (p.weights.empty() || p.weights.size() != p.biases.size())
    throw std::invalid_argument("MlpParams: weights/biases inconsistent");
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    if (p.biases[l].size() != p.weights[l].rows()) throw std::invalid_argument("MlpParams: bias length mismatch");
    if (l > 0 && p.weights[l].cols() != p.weights[l - 1].rows())
      throw std::invalid_argument("MlpParams: layer shapes do not compose");
    if (!p.weights[l].allFinite() || !p.biases[l].allFinite())
      throw std::invalid_argument("MlpParams: non-finite parameter");
  }
  if (p.coeffs.size() != p.weights.back().rows())
    throw std::invalid_argument("MlpParams: coefficient count != final hidden width");
  const bool adaptive = p.activation == Activation::adaptive_tanh;
  if (adaptive != (p.slopes.size() > 0)) throw std::invalid_argument("MlpParams: slopes present iff adaptive_tanh");
  if (adaptive && (p.slopes.size() != static_cast<Eigen::Index>(p.weights.size()) || (p.slopes.array() <= 0).any()))
    throw std::invalid_argument("MlpParams: one positive slope per hidden layer required");
}

Vector flatten(const MlpParams& p) {
  Vector out(p.parameter_count());
  Eigen::Index off = 0;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    out.segment(off, p.weights[l].size()) = p.weights[l].reshaped();
    off += p.weights[l].size();
    out.segment(off, p.biases[l].size()) = p.biases[l];
    off += p.biases[l].size();
  }
  out.segment(off, p.coeffs.size()) = p.coeffs;
  off += p.coeffs.size();
  out.segment(off, p.slopes.size()) = p.slopes;
  return out;
}

void unflatten(MlpParams& p, const Eigen::Ref<const Vector>& flat) {
  if (flat.size() != p.parameter_count()) throw std::invalid_argument("unflatten: size mismatch");
  Eigen::Index off = 0;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    p.weights[l].reshaped() = flat.segment(off, p.weights[l].size());
    off += p.weights[l].size();
    p.biases[l] = flat.segment(off, p.biases[l].size());
    off += p.biases[l].size();
  }
  p.coeffs = flat.segment(off, p.coeffs.size());
  off += p.coeffs.size();
  p.slopes = flat.segment(off, p.slopes.size());
}

Eigen::Index coeff_offset(const MlpParams& p) { return p.parameter_count() - p.coeffs.size() - p.slopes.size(); }

}  // namespace fpinn
