#pragma once

// Candidate Fourier layers. Basis arguments are domain-length normalised:
// theta_n(x) = 2 pi n x / L, so on [0, 2 pi] the bases are cos(n x), sin(n x).

#include <cstdint>
#include <vector>

#include "fpinn/jet.hpp"
#include "fpinn/linalg.hpp"

namespace fpinn {

struct FourierLayer1D {
  double domain_length = 0.0;
  std::vector<int> active_freqs;  // strictly increasing, >= 1
  Vector cos_coeffs;              // a_n, aligned with active_freqs
  Vector sin_coeffs;              // b_n

  Eigen::Index size() const { return static_cast<Eigen::Index>(active_freqs.size()); }
};

/// Frequencies 1..K with zero coefficients.
FourierLayer1D make_candidates(int max_freq, double domain_length);
void validate(const FourierLayer1D& layer);

/// Per-basis jets at n points: columns [cos_1..cos_K | sin_1..sin_K] over `freqs`.
struct FourierFeatures {
  DenseMatrix value;
  DenseMatrix d1;  // empty when order < 1
  DenseMatrix d2;  // empty when order < 2
};

FourierFeatures fourier_features(double domain_length, const std::vector<int>& freqs,
                                 const Eigen::Ref<const Vector>& x, int order);

struct FourierJets {
  JetBatch combined;  // u_B
  FourierFeatures basis;
};

/// `points` is (n x 1).
FourierJets eval_fourier_jets(const FourierLayer1D& layer, const Eigen::MatrixXd& points, int order);

struct PruneReport {
  std::vector<int> removed_freqs;
};

/// Drops frequency n iff max(|a_n|, |b_n|) < delta. `magnitudes` holds one
/// entry per active frequency (normally max(|a_n|, |b_n|) of a fresh solve).
std::pair<FourierLayer1D, PruneReport> prune_bases(const FourierLayer1D& layer, const Eigen::Ref<const Vector>& magnitudes,
                                                   double delta);
/// Convenience: magnitudes taken from the layer's own coefficients.
std::pair<FourierLayer1D, PruneReport> prune_bases(const FourierLayer1D& layer, double delta);

// ---------------------------------------------------------------------------
// Tensor-product layer in two dimensions.
//
// Each axis contributes the feature vector
//   phi(x) = [1?, cos th_1, sin th_1, ..., cos th_K, sin th_K]
// (the leading constant only when include_constant is set) and the layer
// value is beta^T vec(phi(x_1) phi(x_2)^T), vec column-major.

struct FourierLayer2D {
  double lengths[2] = {0.0, 0.0};
  std::vector<int> freqs[2];
  bool include_constant = false;
  Vector beta;
  std::vector<std::uint8_t> active;  // per beta entry

  Eigen::Index axis_features(int axis) const {
    return 2 * static_cast<Eigen::Index>(freqs[axis].size()) + (include_constant ? 1 : 0);
  }
  Eigen::Index active_count() const;
};

FourierLayer2D make_tensor_candidates(int max_freq_x1, int max_freq_x2, double length_x1, double length_x2,
                                      bool include_constant);
void validate(const FourierLayer2D& layer);

/// Axis features in interleaved order (n x F).
FourierFeatures axis_features(double length, const std::vector<int>& freqs, bool include_constant,
                              const Eigen::Ref<const Vector>& x, int order);

/// Jets of the tensor-product layer at (n x 2) points.
JetBatch eval_tensor_jets(const FourierLayer2D& layer, const Eigen::MatrixXd& points, int order);

/// Entry-wise pruning: entry j is deactivated iff |beta_j| < delta.
std::size_t prune_tensor(FourierLayer2D& layer, double delta);

// ---------------------------------------------------------------------------
// Random Fourier feature embedding x -> [cos(2 pi B x), sin(2 pi B x)].

struct RffEmbedding {
  DenseMatrix sampled_freqs;  // features x input_dim
  std::vector<double> scales;
  std::uint64_t seed = 0;

  Eigen::Index features() const { return sampled_freqs.rows(); }
  Eigen::Index output_dim() const { return 2 * sampled_freqs.rows(); }
};

RffEmbedding sample_rff(const std::vector<double>& scales, int features_per_scale, int input_dim, std::uint64_t seed);

/// Embedding channels (2F x C*n) in the network channel layout.
DenseMatrix rff_input(const RffEmbedding& emb, const Eigen::MatrixXd& points, int order);

/// Scale sets accepted by the RFF baseline.
const std::vector<std::vector<double>>& rff_scale_table();

}  // namespace fpinn
