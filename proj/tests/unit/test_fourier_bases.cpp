#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fpinn/diffnet.hpp"
#include "fpinn/fourier_bases.hpp"
#include "oracles.hpp"

using namespace fpinn;
using std::numbers::pi;

TEST(Fourier1D, FeaturesAreNormalisedCosSin) {
  const double L = 3.0;
  const std::vector<int> freqs = {1, 4, 9};
  Vector x = Vector::LinSpaced(7, -0.3, 2.9);
  const auto f = fourier_features(L, freqs, x, 2);
  ASSERT_EQ(f.value.cols(), 6);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      const double w = 2 * pi * freqs[j] / L;
      const auto jj = static_cast<Eigen::Index>(j), m = static_cast<Eigen::Index>(freqs.size());
      EXPECT_NEAR(f.value(i, jj), std::cos(w * x(i)), 1e-13);
      EXPECT_NEAR(f.value(i, m + jj), std::sin(w * x(i)), 1e-13);
      EXPECT_NEAR(f.d1(i, jj), -w * std::sin(w * x(i)), 1e-12 * w);
      EXPECT_NEAR(f.d2(i, m + jj), -w * w * std::sin(w * x(i)), 1e-12 * w * w);
    }
}

TEST(Fourier1D, CombinedJetsMatchFiniteDifferences) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    auto layer = make_candidates(12, 2 * pi);
    for (Eigen::Index j = 0; j < layer.size(); ++j) {
      layer.cos_coeffs(j) = nd(rng) / (1 + j);
      layer.sin_coeffs(j) = nd(rng) / (1 + j);
    }
    DenseMatrix pts(3, 1);
    pts << 0.1 + trial * 0.05, 1.7, 5.9;
    const auto jets = eval_fourier_jets(layer, pts, 2).combined;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      auto f = [&](double t) {
        DenseMatrix p(1, 1);
        p(0, 0) = pts(i, 0) + t;
        return eval_fourier_jets(layer, p, 0).combined.value(0);
      };
      const double g = oracle::d1_4(f, 0.0, 1e-3), s = oracle::d2_4(f, 0.0, 1e-2);
      EXPECT_LT(oracle::rel(jets.grad(i, 0), g), 1e-7);
      // O(h^4) truncation at h = 1e-2 with frequencies up to 12
      EXPECT_LT(oracle::rel(jets.second(i, 0), s, 10.0), 1e-3);
    }
  }
}

TEST(Fourier1D, CandidatesAndValidation) {
  const auto layer = make_candidates(128, 2 * pi);
  ASSERT_EQ(layer.size(), 128);
  EXPECT_EQ(layer.active_freqs.front(), 1);
  EXPECT_EQ(layer.active_freqs.back(), 128);
  EXPECT_EQ(layer.cos_coeffs.norm(), 0.0);
  EXPECT_THROW(make_candidates(0, 1.0), std::invalid_argument);
  auto bad = layer;
  std::swap(bad.active_freqs[0], bad.active_freqs[1]);
  EXPECT_THROW(validate(bad), std::invalid_argument);
}

TEST(Fourier1D, PruneByMaxMagnitude) {
  auto layer = make_candidates(5, 2 * pi);
  layer.cos_coeffs << 1e-5, 0.3, 1e-6, 0.0, 2e-4;
  layer.sin_coeffs << 2e-5, 0.0, 0.5, 0.0, 1e-9;
  const auto [kept, report] = prune_bases(layer, 1e-4);
  EXPECT_EQ(kept.active_freqs, (std::vector<int>{2, 3, 5}));
  EXPECT_EQ(report.removed_freqs, (std::vector<int>{1, 4}));
  EXPECT_DOUBLE_EQ(kept.sin_coeffs(1), 0.5);
  // pruning never adds bases and delta = 0 removes nothing
  EXPECT_EQ(prune_bases(layer, 0.0).first.size(), 5);
  EXPECT_LE(prune_bases(kept, 1.0).first.size(), kept.size());
}

TEST(Fourier2D, TensorJetsMatchFiniteDifferences) {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    auto layer = make_tensor_candidates(4, 3, 2 * pi, 3.0, trial % 2 == 0);
    for (Eigen::Index j = 0; j < layer.beta.size(); ++j) layer.beta(j) = nd(rng);
    if (trial % 3 == 0) layer.active[1] = 0;
    DenseMatrix pts(2, 2);
    pts << 0.4, 1.1, 3.3, 2.2;
    const auto jets = eval_tensor_jets(layer, pts, 2);
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
      for (int k = 0; k < 2; ++k) {
        auto f = [&](double t) {
          DenseMatrix p = pts.row(i);
          p(0, k) += t;
          return eval_tensor_jets(layer, p, 0).value(0);
        };
        EXPECT_LT(oracle::rel(jets.grad(i, k), oracle::d1_4(f, 0, 1e-3)), 1e-7);
        EXPECT_LT(oracle::rel(jets.second(i, k), oracle::d2_4(f, 0, 1e-2), 10.0), 1e-4);
      }
  }
}

TEST(Fourier2D, ValueIsBilinearFormOfAxisFeatures) {
  auto layer = make_tensor_candidates(3, 2, 2.0, 1.0, true);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd;
  for (Eigen::Index j = 0; j < layer.beta.size(); ++j) layer.beta(j) = nd(rng);
  layer.active[4] = 0;
  DenseMatrix pts(1, 2);
  pts << 0.3, 0.7;
  const auto f0 = axis_features(2.0, layer.freqs[0], true, pts.col(0), 0).value;
  const auto f1 = axis_features(1.0, layer.freqs[1], true, pts.col(1), 0).value;
  ASSERT_EQ(f0.cols(), 7);
  ASSERT_EQ(f1.cols(), 5);
  EXPECT_DOUBLE_EQ(f0(0, 0), 1.0);
  EXPECT_NEAR(f0(0, 1), std::cos(2 * pi * 0.3 / 2.0), 1e-14);
  EXPECT_NEAR(f0(0, 2), std::sin(2 * pi * 0.3 / 2.0), 1e-14);
  double expect = 0;
  for (Eigen::Index b = 0; b < 5; ++b)
    for (Eigen::Index a = 0; a < 7; ++a) {
      const Eigen::Index idx = a + 7 * b;
      if (layer.active[static_cast<std::size_t>(idx)]) expect += layer.beta(idx) * f0(0, a) * f1(0, b);
    }
  EXPECT_NEAR(eval_tensor_jets(layer, pts, 0).value(0), expect, 1e-13);
}

TEST(Fourier2D, PruneEntrywise) {
  auto layer = make_tensor_candidates(2, 2, 1.0, 1.0, false);
  layer.beta.setConstant(1.0);
  layer.beta(3) = 1e-6;
  layer.beta(7) = -5e-5;
  EXPECT_EQ(prune_tensor(layer, 1e-4), 2u);
  EXPECT_EQ(layer.active_count(), layer.beta.size() - 2);
  EXPECT_EQ(layer.active[3], 0);
  EXPECT_EQ(prune_tensor(layer, 1e-4), 0u);
}

TEST(Rff, EmbeddingDerivativesAndDeterminism) {
  const auto emb = sample_rff({1.0, 10.0}, 8, 2, 99);
  const auto again = sample_rff({1.0, 10.0}, 8, 2, 99);
  EXPECT_EQ(emb.sampled_freqs, again.sampled_freqs);
  EXPECT_EQ(emb.output_dim(), 32);
  DenseMatrix pts(1, 2);
  pts << 0.2, -0.4;
  const auto h = rff_input(emb, pts, 2);
  ChannelLayout lay{1, 2, 2};
  for (Eigen::Index r = 0; r < h.rows(); ++r)
    for (int k = 0; k < 2; ++k) {
      auto f = [&](double t) {
        DenseMatrix p = pts;
        p(0, k) += t;
        return rff_input(emb, p, 0)(r, 0);
      };
      const double scale = std::max(1.0, std::pow(2 * pi * emb.sampled_freqs.row(r % 16).norm(), 2));
      EXPECT_LT(std::abs(h(r, lay.grad_block(k)) - oracle::d1_4(f, 0, 1e-4)) / scale, 1e-7);
      EXPECT_LT(std::abs(h(r, lay.second_block(k)) - oracle::d2_4(f, 0, 1e-4)) / scale, 1e-5);
    }
  EXPECT_EQ(rff_scale_table().size(), 19u);
  EXPECT_THROW(sample_rff({}, 4, 1, 0), std::invalid_argument);
}
