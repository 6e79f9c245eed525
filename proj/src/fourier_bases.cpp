#include "fpinn/fourier_bases.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fpinn/diffnet.hpp"

namespace fpinn {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

FourierLayer1D make_candidates(int max_freq, double domain_length) {
  if (max_freq < 1) throw std::invalid_argument("make_candidates: K must be >= 1");
  if (!(domain_length > 0.0)) throw std::invalid_argument("make_candidates: L must be > 0");
  FourierLayer1D layer;
  layer.domain_length = domain_length;
  for (int n = 1; n <= max_freq; ++n) layer.active_freqs.push_back(n);
  layer.cos_coeffs = Vector::Zero(max_freq);
  layer.sin_coeffs = Vector::Zero(max_freq);
  return layer;
}

void validate(const FourierLayer1D& layer) {
  if (!(layer.domain_length > 0.0)) throw std::invalid_argument("FourierLayer1D: L must be > 0");
  for (std::size_t i = 0; i < layer.active_freqs.size(); ++i) {
    if (layer.active_freqs[i] < 1) throw std::invalid_argument("FourierLayer1D: frequencies must be >= 1");
    if (i > 0 && layer.active_freqs[i] <= layer.active_freqs[i - 1])
      throw std::invalid_argument("FourierLayer1D: frequencies must be strictly increasing");
  }
  if (layer.cos_coeffs.size() != layer.size() || layer.sin_coeffs.size() != layer.size())
    throw std::invalid_argument("FourierLayer1D: coefficient length mismatch");
}

FourierFeatures fourier_features(double domain_length, const std::vector<int>& freqs, const Eigen::Ref<const Vector>& x,
                                 int order) {
  const Eigen::Index n = x.size();
  const auto k = static_cast<Eigen::Index>(freqs.size());
  FourierFeatures f;
  f.value.resize(n, 2 * k);
  if (order >= 1) f.d1.resize(n, 2 * k);
  if (order >= 2) f.d2.resize(n, 2 * k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double kappa = two_pi * freqs[static_cast<std::size_t>(j)] / domain_length;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double th = kappa * x(i);
      const double c = std::cos(th), s = std::sin(th);
      f.value(i, j) = c;
      f.value(i, k + j) = s;
      if (order >= 1) {
        f.d1(i, j) = -kappa * s;
        f.d1(i, k + j) = kappa * c;
      }
      if (order >= 2) {
        f.d2(i, j) = -kappa * kappa * c;
        f.d2(i, k + j) = -kappa * kappa * s;
      }
    }
  }
  return f;
}

FourierJets eval_fourier_jets(const FourierLayer1D& layer, const Eigen::MatrixXd& points, int order) {
  validate(layer);
  if (points.cols() != 1) throw std::invalid_argument("eval_fourier_jets: 1D points required");
  FourierJets out;
  out.basis = fourier_features(layer.domain_length, layer.active_freqs, points.col(0), order);
  Vector coeffs(2 * layer.size());
  coeffs << layer.cos_coeffs, layer.sin_coeffs;
  out.combined = JetBatch(points.rows(), 1, order);
  out.combined.value = out.basis.value * coeffs;
  if (order >= 1) out.combined.grad.col(0) = out.basis.d1 * coeffs;
  if (order >= 2) out.combined.second.col(0) = out.basis.d2 * coeffs;
  return out;
}

std::pair<FourierLayer1D, PruneReport> prune_bases(const FourierLayer1D& layer, const Eigen::Ref<const Vector>& magnitudes,
                                                   double delta) {
  if (magnitudes.size() != layer.size()) throw std::invalid_argument("prune_bases: one magnitude per frequency");
  if (!(delta >= 0.0)) throw std::invalid_argument("prune_bases: delta must be >= 0");
  FourierLayer1D kept;
  kept.domain_length = layer.domain_length;
  PruneReport report;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < layer.size(); ++j) {
    if (magnitudes(j) < delta)
      report.removed_freqs.push_back(layer.active_freqs[static_cast<std::size_t>(j)]);
    else
      keep.push_back(j);
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  kept.cos_coeffs.resize(m);
  kept.sin_coeffs.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto j = keep[static_cast<std::size_t>(i)];
    kept.active_freqs.push_back(layer.active_freqs[static_cast<std::size_t>(j)]);
    kept.cos_coeffs(i) = layer.cos_coeffs(j);
    kept.sin_coeffs(i) = layer.sin_coeffs(j);
  }
  return {std::move(kept), std::move(report)};
}

std::pair<FourierLayer1D, PruneReport> prune_bases(const FourierLayer1D& layer, double delta) {
  const Vector mags = layer.cos_coeffs.cwiseAbs().cwiseMax(layer.sin_coeffs.cwiseAbs());
  return prune_bases(layer, mags, delta);
}

// ---------------------------------------------------------------------------

Eigen::Index FourierLayer2D::active_count() const {
  Eigen::Index n = 0;
  for (auto a : active) n += a ? 1 : 0;
  return n;
}

FourierLayer2D make_tensor_candidates(int max_freq_x1, int max_freq_x2, double length_x1, double length_x2,
                                      bool include_constant) {
  if (max_freq_x1 < 1 || max_freq_x2 < 1) throw std::invalid_argument("make_tensor_candidates: K must be >= 1");
  if (!(length_x1 > 0.0) || !(length_x2 > 0.0)) throw std::invalid_argument("make_tensor_candidates: L must be > 0");
  FourierLayer2D layer;
  layer.lengths[0] = length_x1;
  layer.lengths[1] = length_x2;
  for (int n = 1; n <= max_freq_x1; ++n) layer.freqs[0].push_back(n);
  for (int n = 1; n <= max_freq_x2; ++n) layer.freqs[1].push_back(n);
  layer.include_constant = include_constant;
  const Eigen::Index total = layer.axis_features(0) * layer.axis_features(1);
  layer.beta = Vector::Zero(total);
  layer.active.assign(static_cast<std::size_t>(total), 1);
  return layer;
}

void validate(const FourierLayer2D& layer) {
  const Eigen::Index total = layer.axis_features(0) * layer.axis_features(1);
  if (layer.beta.size() != total) throw std::invalid_argument("FourierLayer2D: beta length mismatch");
  if (static_cast<Eigen::Index>(layer.active.size()) != total)
    throw std::invalid_argument("FourierLayer2D: active mask length mismatch");
  if (!(layer.lengths[0] > 0.0) || !(layer.lengths[1] > 0.0))
    throw std::invalid_argument("FourierLayer2D: lengths must be > 0");
}

FourierFeatures axis_features(double length, const std::vector<int>& freqs, bool include_constant,
                              const Eigen::Ref<const Vector>& x, int order) {
  const Eigen::Index n = x.size();
  const Eigen::Index off = include_constant ? 1 : 0;
  const auto k = static_cast<Eigen::Index>(freqs.size());
  FourierFeatures f;
  f.value.resize(n, 2 * k + off);
  if (order >= 1) f.d1 = DenseMatrix::Zero(n, 2 * k + off);
  if (order >= 2) f.d2 = DenseMatrix::Zero(n, 2 * k + off);
  if (include_constant) f.value.col(0).setOnes();
  for (Eigen::Index j = 0; j < k; ++j) {
    const double kappa = two_pi * freqs[static_cast<std::size_t>(j)] / length;
    const Eigen::Index ci = off + 2 * j, si = ci + 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double th = kappa * x(i);
      const double c = std::cos(th), s = std::sin(th);
      f.value(i, ci) = c;
      f.value(i, si) = s;
      if (order >= 1) {
        f.d1(i, ci) = -kappa * s;
        f.d1(i, si) = kappa * c;
      }
      if (order >= 2) {
        f.d2(i, ci) = -kappa * kappa * c;
        f.d2(i, si) = -kappa * kappa * s;
      }
    }
  }
  return f;
}

JetBatch eval_tensor_jets(const FourierLayer2D& layer, const Eigen::MatrixXd& points, int order) {
  validate(layer);
  if (points.cols() != 2) throw std::invalid_argument("eval_tensor_jets: 2D points required");
  const auto f1 = axis_features(layer.lengths[0], layer.freqs[0], layer.include_constant, points.col(0), order);
  const auto f2 = axis_features(layer.lengths[1], layer.freqs[1], layer.include_constant, points.col(1), order);
  Vector masked = layer.beta;
  for (Eigen::Index j = 0; j < masked.size(); ++j)
    if (!layer.active[static_cast<std::size_t>(j)]) masked(j) = 0.0;
  const auto b = masked.reshaped(layer.axis_features(0), layer.axis_features(1));

  JetBatch out(points.rows(), 2, order);
  const DenseMatrix t0 = f1.value * b;
  out.value = (t0.array() * f2.value.array()).rowwise().sum();
  if (order >= 1) {
    const DenseMatrix t1 = f1.d1 * b;
    out.grad.col(0) = (t1.array() * f2.value.array()).rowwise().sum();
    out.grad.col(1) = (t0.array() * f2.d1.array()).rowwise().sum();
  }
  if (order >= 2) {
    const DenseMatrix t2 = f1.d2 * b;
    out.second.col(0) = (t2.array() * f2.value.array()).rowwise().sum();
    out.second.col(1) = (t0.array() * f2.d2.array()).rowwise().sum();
  }
  return out;
}

std::size_t prune_tensor(FourierLayer2D& layer, double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("prune_tensor: delta must be >= 0");
  std::size_t removed = 0;
  for (Eigen::Index j = 0; j < layer.beta.size(); ++j) {
    auto& a = layer.active[static_cast<std::size_t>(j)];
    if (a && std::abs(layer.beta(j)) < delta) {
      a = 0;
      layer.beta(j) = 0.0;
      ++removed;
    }
  }
  return removed;
}

// ---------------------------------------------------------------------------

RffEmbedding sample_rff(const std::vector<double>& scales, int features_per_scale, int input_dim, std::uint64_t seed) {
  if (scales.empty()) throw std::invalid_argument("sample_rff: at least one scale required");
  if (features_per_scale < 1 || input_dim < 1) throw std::invalid_argument("sample_rff: counts must be >= 1");
  for (double s : scales)
    if (!(s > 0.0)) throw std::invalid_argument("sample_rff: scales must be positive");
  RffEmbedding emb;
  emb.scales = scales;
  emb.seed = seed;
  emb.sampled_freqs.resize(static_cast<Eigen::Index>(scales.size()) * features_per_scale, input_dim);
  std::mt19937_64 rng(seed);
  Eigen::Index row = 0;
  for (double s : scales) {
    std::normal_distribution<double> dist(0.0, s);
    for (int f = 0; f < features_per_scale; ++f, ++row)
      for (int d = 0; d < input_dim; ++d) emb.sampled_freqs(row, d) = dist(rng);
  }
  return emb;
}

DenseMatrix rff_input(const RffEmbedding& emb, const Eigen::MatrixXd& points, int order) {
  if (points.cols() != emb.sampled_freqs.cols()) throw std::invalid_argument("rff_input: dimension mismatch");
  ChannelLayout lay{points.rows(), points.cols(), order};
  const Eigen::Index f = emb.features(), n = lay.points;
  DenseMatrix h = DenseMatrix::Zero(2 * f, lay.cols());
  const DenseMatrix omega = two_pi * emb.sampled_freqs;  // f x d
  const DenseMatrix arg = omega * points.transpose();    // f x n
  const DenseMatrix c = arg.array().cos().matrix();
  const DenseMatrix s = arg.array().sin().matrix();
  h.block(0, 0, f, n) = c;
  h.block(f, 0, f, n) = s;
  for (Eigen::Index k = 0; k < lay.dim && order >= 1; ++k) {
    const Vector w = omega.col(k);
    h.block(0, lay.grad_block(k), f, n) = -(s.array().colwise() * w.array()).matrix();
    h.block(f, lay.grad_block(k), f, n) = (c.array().colwise() * w.array()).matrix();
    if (order >= 2) {
      const Eigen::ArrayXd w2 = w.array().square();
      h.block(0, lay.second_block(k), f, n) = -(c.array().colwise() * w2).matrix();
      h.block(f, lay.second_block(k), f, n) = -(s.array().colwise() * w2).matrix();
    }
  }
  return h;
}

const std::vector<std::vector<double>>& rff_scale_table() {
  static const std::vector<std::vector<double>> table = {
      {20},
      {50},
      {84},
      {100},
      {1, 50},
      {3, 20},
      {19, 71},
      {39, 69},
      {50, 100},
      {44, 47, 165},
      {1, 20, 194},
      {20, 50, 100},
      {1, 50, 189},
      {38, 112, 119},
      {1, 20, 49, 50, 100},
      {1, 20, 50, 85, 100},
      {1, 20, 104, 197, 199},
      {6, 36, 67, 79, 136},
      {50, 65, 83, 104, 139},
  };
  return table;
}

}  // namespace fpinn
