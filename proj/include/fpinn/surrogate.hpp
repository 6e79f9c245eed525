#pragma once

// Tagged surrogate models over one flat trainable vector:
//   [network (W, b, c, slopes) | Fourier coefficients | log steepness]
// Point-set features that do not depend on parameters are cached per set.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpinn/boundary.hpp"
#include "fpinn/diffnet.hpp"
#include "fpinn/fourier_bases.hpp"
#include "fpinn/problems.hpp"

namespace fpinn {

enum class VariantTag {
  standard_pinn,
  strong_bc_poly,
  strong_bc_exp,
  fourier_pinn,
  fourier_pinn_no_ls,
  rff_pinn,
  w_pinn,
  a_pinn,
  spectral_only,
};

struct VariantSpec {
  VariantTag tag = VariantTag::standard_pinn;
  std::vector<double> rff_scales;  // rff_pinn
  int rff_features_per_scale = 64;
  double residual_weight = 1.0;  // w_pinn

  bool has_net() const { return tag != VariantTag::spectral_only; }
  bool has_fourier() const {
    return tag == VariantTag::fourier_pinn || tag == VariantTag::fourier_pinn_no_ls || tag == VariantTag::spectral_only;
  }
  bool strong() const { return tag == VariantTag::strong_bc_poly || tag == VariantTag::strong_bc_exp; }
  bool uses_ls() const { return tag == VariantTag::fourier_pinn; }
};

const std::vector<std::string>& variant_names();
std::string variant_name(VariantTag tag);
/// Throws std::invalid_argument listing the registered names.
VariantTag parse_variant(const std::string& name);

struct ModelConfig {
  std::vector<int> hidden = {50, 50};
  int max_freq = 128;           // candidates 1..K per axis
  bool include_constant = true;  // 2D tensor layer only
  /// Fourier period per axis; empty means the domain length.
  std::vector<double> fourier_period;
  double exp_alpha = 0.5;
  bool train_alpha = true;
  bool freeze_fourier = false;
  bool single_precision = false;
  std::uint64_t seed = 0;
};

struct SurrogateModel {
  VariantSpec variant;
  Eigen::Index dim = 1;
  bool single_precision = false;
  bool freeze_fourier = false;

  MlpParams net;
  std::vector<std::uint8_t> nn_active;  // per last-layer basis
  std::optional<RffEmbedding> rff;

  // Fourier layer: 1D keeps the candidate bank and the current layer,
  // 2D masks entries of beta.
  int max_freq = 0;
  FourierLayer1D fourier1d;
  FourierLayer2D fourier2d;

  DistanceFn distance;
  BoundaryLift lift;

  bool has_net() const { return variant.has_net(); }
  bool has_fourier() const { return variant.has_fourier(); }
  bool strong() const { return variant.strong(); }
  bool trains_alpha() const { return strong() && distance.trainable && distance.kind == DistanceKind::exp; }
  /// False once every last-layer basis has been pruned.
  bool net_alive() const;

  Eigen::Index net_count() const { return has_net() ? net.parameter_count() : 0; }
  Eigen::Index fourier_count() const;
  Eigen::Index alpha_count() const { return trains_alpha() ? distance.parameter_count() : 0; }
  Eigen::Index parameter_count() const { return net_count() + fourier_count() + alpha_count(); }
  Eigen::Index fourier_offset() const { return net_count(); }
  Eigen::Index alpha_offset() const { return net_count() + fourier_count(); }
  Eigen::Index c_offset() const { return coeff_offset(net); }

  Eigen::Index active_nn() const;
  Eigen::Index active_fourier() const;  // frequencies (1D) or beta entries (2D)
  /// Size of the ridge vector w (last-layer coefficients and Fourier coefficients).
  Eigen::Index w_count() const;
};

/// Rejects incompatible (variant, problem) pairs, e.g. strong BCs on a box
/// with a free face.
SurrogateModel make_model(const VariantSpec& variant, const PdeProblem& problem, const ModelConfig& cfg);

Vector get_params(const SurrogateModel& m);
void set_params(SurrogateModel& m, const Vector& flat);
/// Zeroes gradient entries of pruned or frozen parameters.
void mask_gradient(const SurrogateModel& m, Vector& grad);

/// The ridge coordinates w inside the flat vector, in LS column order:
/// active c_j, then (1D) a of active freqs, b of active freqs / (2D) active beta.
std::vector<Eigen::Index> w_indices(const SurrogateModel& m);

// ---------------------------------------------------------------------------

struct PointCache {
  Eigen::MatrixXd points;
  ChannelLayout layout;
  DenseMatrix net_input;
  MatrixX<float> net_input_f;
  FourierFeatures bank1d;     // full candidate bank, 1D
  FourierFeatures axis[2];    // per-axis features, 2D
  JetBatch lift;              // strong variants
  JetBatch phi;               // fixed distance (poly or untrained exp)
};

PointCache make_cache(const SurrogateModel& m, const Eigen::MatrixXd& points, int order);

struct Evaluation {
  JetBatch u;
  JetBatch net;  // core network jets (zero when the net is skipped)
  JetBatch phi;
  bool net_evaluated = false;
  MlpTape<double> tape;
  MlpTape<float> tape_f;
};

Evaluation evaluate(const SurrogateModel& m, const PointCache& c);
/// d/dtheta of sum_i <u_bar_i, u_i>, unmasked.
Vector backward(const SurrogateModel& m, const PointCache& c, const Evaluation& e, const JetBatch& u_bar);

/// Values only on an arbitrary point set (no caching).
Vector predict(const SurrogateModel& m, const Eigen::MatrixXd& points);

/// Per-basis jets of the ridge coordinates at the cached points, in
/// w_indices order, each (n x P). Requires an evaluation of the same params.
struct BasisJets {
  DenseMatrix value;
  std::vector<DenseMatrix> grad;
  std::vector<DenseMatrix> second;
};
BasisJets basis_jets(const SurrogateModel& m, const PointCache& c, const Evaluation& e);

// Components used by spectrum decomposition.
Vector predict_net_part(const SurrogateModel& m, const Eigen::MatrixXd& points);

}  // namespace fpinn
