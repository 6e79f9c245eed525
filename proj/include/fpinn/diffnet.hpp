#pragma once

// Fully connected tanh networks u_N(x) = sum_j c_j psi_j(x) with exact forward
// propagation of (value, d/dx_i, d^2/dx_i^2) jets and reverse-mode parameter
// gradients through those jets.
//
// Channel layout: every activation matrix is (units x C*n) where n is the
// number of points and the C column blocks are
//   [value | d/dx_1 .. d/dx_d | d2/dx_1^2 .. d2/dx_d^2]
// truncated to the requested derivative order.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fpinn/jet.hpp"
#include "fpinn/linalg.hpp"

namespace fpinn {

enum class Activation { tanh, adaptive_tanh, identity };

struct ChannelLayout {
  Eigen::Index points = 0;
  Eigen::Index dim = 0;
  int order = 0;

  Eigen::Index channels() const { return 1 + (order >= 1 ? dim : 0) + (order >= 2 ? dim : 0); }
  Eigen::Index cols() const { return channels() * points; }
  Eigen::Index grad_block(Eigen::Index k) const { return (1 + k) * points; }
  Eigen::Index second_block(Eigen::Index k) const { return (1 + dim + k) * points; }
};

template <typename Scalar>
struct MlpParamsT {
  std::vector<MatrixX<Scalar>> weights;  // layer l: (out x in)
  std::vector<VectorX<Scalar>> biases;
  VectorX<Scalar> coeffs;  // last-layer coefficients c, no output bias
  Activation activation = Activation::tanh;
  VectorX<Scalar> slopes;  // one per hidden layer, adaptive_tanh only

  Eigen::Index input_dim() const { return weights.empty() ? 0 : weights.front().cols(); }
  Eigen::Index width() const { return coeffs.size(); }
  std::size_t hidden_layers() const { return weights.size(); }

  Eigen::Index parameter_count() const {
    Eigen::Index n = coeffs.size() + slopes.size();
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
  }

  template <typename T>
  MlpParamsT<T> cast() const {
    MlpParamsT<T> out;
    for (const auto& w : weights) out.weights.push_back(w.template cast<T>());
    for (const auto& b : biases) out.biases.push_back(b.template cast<T>());
    out.coeffs = coeffs.template cast<T>();
    out.activation = activation;
    out.slopes = slopes.template cast<T>();
    return out;
  }
};

using MlpParams = MlpParamsT<double>;

/// widths = (input, hidden..., 1). Glorot-uniform weights, zero biases, unit slopes.
MlpParams init_params(std::span<const int> widths, std::uint64_t seed, Activation activation);

/// Throws std::invalid_argument when shapes do not compose.
void validate(const MlpParams& p);

/// Flat layout: [W_0 (col-major), b_0, ..., W_{L-1}, b_{L-1}, c, slopes].
Vector flatten(const MlpParams& p);
void unflatten(MlpParams& p, const Eigen::Ref<const Vector>& flat);
/// Offset of c inside the flat layout.
Eigen::Index coeff_offset(const MlpParams& p);

/// Seed channels for raw coordinates: value = x, d/dx_k = e_k, second = 0.
/// `points` is (n x d).
template <typename Scalar>
MatrixX<Scalar> coordinate_input(const Eigen::MatrixXd& points, int order) {
  ChannelLayout lay{points.rows(), points.cols(), order};
  MatrixX<Scalar> h = MatrixX<Scalar>::Zero(lay.dim, lay.cols());
  h.leftCols(lay.points) = points.transpose().template cast<Scalar>();
  if (order >= 1)
    for (Eigen::Index k = 0; k < lay.dim; ++k) h.row(k).segment(lay.grad_block(k), lay.points).setOnes();
  return h;
}

/// Forward record of one jet evaluation.
template <typename Scalar>
struct MlpTape {
  ChannelLayout layout;
  std::vector<MatrixX<Scalar>> inputs;  // input to layer l, inputs[L] = last hidden output psi
  std::vector<MatrixX<Scalar>> pre;     // pre-activation of layer l
  MatrixX<Scalar> output;               // 1 x C*n, u_N = c^T psi

  const MatrixX<Scalar>& basis() const { return inputs.back(); }
};

namespace detail {

template <typename Scalar>
void activate(const MlpParamsT<Scalar>& p, std::size_t l, const ChannelLayout& lay, const MatrixX<Scalar>& z,
              MatrixX<Scalar>& h) {
  if (p.activation == Activation::identity) {
    h = z;
    return;
  }
  const Scalar s = p.activation == Activation::adaptive_tanh ? p.slopes(l) : Scalar(1);
  const Eigen::Index n = lay.points;
  h.resize(z.rows(), z.cols());
  auto zv = z.leftCols(n).array();
  auto t = h.leftCols(n).array();
  t = (s * zv).tanh();
  if (lay.order == 0) return;
  const auto s1 = (Scalar(1) - t.square()).eval();
  for (Eigen::Index k = 0; k < lay.dim; ++k)
    h.middleCols(lay.grad_block(k), n).array() = s * s1 * z.middleCols(lay.grad_block(k), n).array();
  if (lay.order < 2) return;
  const auto s2 = (Scalar(-2) * t * s1).eval();
  for (Eigen::Index k = 0; k < lay.dim; ++k) {
    auto dz = z.middleCols(lay.grad_block(k), n).array();
    auto ddz = z.middleCols(lay.second_block(k), n).array();
    h.middleCols(lay.second_block(k), n).array() = s * s * s2 * dz.square() + s * s1 * ddz;
  }
}

// Maps the adjoint of h = act(z) channels to the adjoint of z channels; accumulates the slope adjoint.
template <typename Scalar>
void activate_adjoint(const MlpParamsT<Scalar>& p, std::size_t l, const ChannelLayout& lay, const MatrixX<Scalar>& z,
                      const MatrixX<Scalar>& h, const MatrixX<Scalar>& hbar, MatrixX<Scalar>& zbar,
                      Scalar* slope_bar) {
  if (p.activation == Activation::identity) {
    zbar = hbar;
    return;
  }
  const Scalar s = p.activation == Activation::adaptive_tanh ? p.slopes(l) : Scalar(1);
  const Eigen::Index n = lay.points;
  zbar.resize(z.rows(), z.cols());
  const auto t = h.leftCols(n).array();
  const auto zv = z.leftCols(n).array();
  const auto s1 = (Scalar(1) - t.square()).eval();
  const auto s2 = (Scalar(-2) * t * s1).eval();
  const auto s3 = (Scalar(-2) * s1.square() + Scalar(4) * t.square() * s1).eval();
  const auto hv = hbar.leftCols(n).array();

  auto zv_bar = zbar.leftCols(n).array();
  zv_bar = hv * s * s1;
  Scalar sbar = (hv * s1 * zv).sum();

  for (Eigen::Index k = 0; k < lay.dim && lay.order >= 1; ++k) {
    const auto dz = z.middleCols(lay.grad_block(k), n).array();
    const auto dh_bar = hbar.middleCols(lay.grad_block(k), n).array();
    zv_bar += dh_bar * s * s * s2 * dz;
    auto dz_bar = zbar.middleCols(lay.grad_block(k), n).array();
    dz_bar = dh_bar * s * s1;
    sbar += (dh_bar * (s1 * dz + s * s2 * zv * dz)).sum();
    if (lay.order >= 2) {
      const auto ddz = z.middleCols(lay.second_block(k), n).array();
      const auto ddh_bar = hbar.middleCols(lay.second_block(k), n).array();
      zv_bar += ddh_bar * (s * s * s * s3 * dz.square() + s * s * s2 * ddz);
      dz_bar += ddh_bar * Scalar(2) * s * s * s2 * dz;
      zbar.middleCols(lay.second_block(k), n).array() = ddh_bar * s * s1;
      sbar += (ddh_bar * (Scalar(2) * s * s2 * dz.square() + s * s * s3 * zv * dz.square() + s1 * ddz +
                          s * s2 * zv * ddz))
                  .sum();
    }
  }
  if (slope_bar) *slope_bar += sbar;
}

}  // namespace detail

/// Propagates input channels (units x C*n) through every hidden layer and the
/// last-layer combination.
template <typename Scalar>
MlpTape<Scalar> forward(const MlpParamsT<Scalar>& p, MatrixX<Scalar> input, const ChannelLayout& layout) {
  if (input.rows() != p.input_dim()) throw std::invalid_argument("forward: input dimension mismatch");
  if (input.cols() != layout.cols()) throw std::invalid_argument("forward: channel layout mismatch");
  MlpTape<Scalar> tape;
  tape.layout = layout;
  tape.inputs.reserve(p.hidden_layers() + 1);
  tape.pre.reserve(p.hidden_layers());
  tape.inputs.push_back(std::move(input));
  for (std::size_t l = 0; l < p.hidden_layers(); ++l) {
    MatrixX<Scalar> z = p.weights[l] * tape.inputs[l];
    z.leftCols(layout.points).colwise() += p.biases[l];
    MatrixX<Scalar> h;
    detail::activate(p, l, layout, z, h);
    tape.pre.push_back(std::move(z));
    tape.inputs.push_back(std::move(h));
  }
  tape.output = p.coeffs.transpose() * tape.inputs.back();
  return tape;
}

/// Jets at raw coordinate points (n x d).
template <typename Scalar>
MlpTape<Scalar> eval_jets(const MlpParamsT<Scalar>& p, const Eigen::MatrixXd& points, int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("eval_jets: order must be 0, 1 or 2");
  if (points.cols() != p.input_dim()) throw std::invalid_argument("eval_jets: point dimension mismatch");
  ChannelLayout lay{points.rows(), points.cols(), order};
  return forward(p, coordinate_input<Scalar>(points, order), lay);
}

/// Gradient of sum_i <adjoint_i, jet_i> with respect to the flat parameter
/// vector; `output_adjoint` is 1 x C*n in channel layout.
template <typename Scalar>
VectorX<Scalar> param_gradient(const MlpParamsT<Scalar>& p, const MlpTape<Scalar>& tape,
                               const MatrixX<Scalar>& output_adjoint) {
  const auto& lay = tape.layout;
  if (output_adjoint.rows() != 1 || output_adjoint.cols() != lay.cols())
    throw std::invalid_argument("param_gradient: adjoint shape mismatch");
  VectorX<Scalar> grad(p.parameter_count());
  const std::size_t layers = p.hidden_layers();

  // offsets of each block in the flat vector
  std::vector<Eigen::Index> w_off(layers), b_off(layers);
  Eigen::Index off = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    w_off[l] = off;
    off += p.weights[l].size();
    b_off[l] = off;
    off += p.biases[l].size();
  }
  const Eigen::Index c_off = off;
  const Eigen::Index s_off = c_off + p.coeffs.size();

  grad.segment(c_off, p.coeffs.size()) = tape.basis() * output_adjoint.transpose();
  MatrixX<Scalar> hbar = p.coeffs * output_adjoint;
  MatrixX<Scalar> zbar;
  for (std::size_t l = layers; l-- > 0;) {
    Scalar sbar(0);
    detail::activate_adjoint(p, l, lay, tape.pre[l], tape.inputs[l + 1], hbar, zbar,
                             p.activation == Activation::adaptive_tanh ? &sbar : nullptr);
    if (p.activation == Activation::adaptive_tanh) grad(s_off + static_cast<Eigen::Index>(l)) = sbar;
    Eigen::Map<MatrixX<Scalar>>(grad.data() + w_off[l], p.weights[l].rows(), p.weights[l].cols()) =
        zbar * tape.inputs[l].transpose();
    grad.segment(b_off[l], p.biases[l].size()) = zbar.leftCols(lay.points).rowwise().sum();
    if (l > 0) hbar = p.weights[l].transpose() * zbar;
  }
  return grad;
}

/// Channel-layout row (1 x C*n) -> JetBatch.
template <typename Scalar>
JetBatch to_jets(const MatrixX<Scalar>& row, const ChannelLayout& lay) {
  JetBatch j(lay.points, lay.dim, lay.order);
  j.value = row.leftCols(lay.points).transpose().template cast<double>();
  for (Eigen::Index k = 0; k < lay.dim && lay.order >= 1; ++k) {
    j.grad.col(k) = row.middleCols(lay.grad_block(k), lay.points).transpose().template cast<double>();
    if (lay.order >= 2)
      j.second.col(k) = row.middleCols(lay.second_block(k), lay.points).transpose().template cast<double>();
  }
  return j;
}

/// JetBatch adjoint -> channel-layout row (1 x C*n).
template <typename Scalar>
MatrixX<Scalar> to_channels(const JetBatch& j, const ChannelLayout& lay) {
  MatrixX<Scalar> row = MatrixX<Scalar>::Zero(1, lay.cols());
  row.leftCols(lay.points) = j.value.transpose().template cast<Scalar>();
  for (Eigen::Index k = 0; k < lay.dim && lay.order >= 1; ++k) {
    if (j.grad.size()) row.middleCols(lay.grad_block(k), lay.points) = j.grad.col(k).transpose().template cast<Scalar>();
    if (lay.order >= 2 && j.second.size())
      row.middleCols(lay.second_block(k), lay.points) = j.second.col(k).transpose().template cast<Scalar>();
  }
  return row;
}

/// Per-basis channel block k of psi as an (n x W) matrix.
template <typename Scalar>
Eigen::MatrixXd basis_block(const MlpTape<Scalar>& tape, Eigen::Index block_start) {
  return tape.basis().middleCols(block_start, tape.layout.points).transpose().template cast<double>();
}

}  // namespace fpinn
