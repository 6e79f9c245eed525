#include <random>

#include <gtest/gtest.h>

#include "fpinn/diffnet.hpp"
#include "oracles.hpp"

using namespace fpinn;

namespace {

MlpParams random_net(std::mt19937_64& rng, int dim, Activation act) {
  std::uniform_int_distribution<int> depth(1, 3), width(3, 12);
  std::vector<int> widths = {dim};
  const int layers = depth(rng);
  for (int l = 0; l < layers; ++l) widths.push_back(width(rng));
  widths.push_back(1);
  auto p = init_params(widths, rng(), act);
  std::normal_distribution<double> nd(0, 0.3);
  for (auto& b : p.biases)
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = nd(rng);
  for (Eigen::Index i = 0; i < p.coeffs.size(); ++i) p.coeffs(i) = nd(rng);
  for (Eigen::Index i = 0; i < p.slopes.size(); ++i) p.slopes(i) = 1.0 + 0.5 * std::abs(nd(rng));
  return p;
}

DenseMatrix random_points(std::mt19937_64& rng, int n, int dim) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  DenseMatrix x(n, dim);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k) x(i, k) = u(rng);
  return x;
}

double net_value(const MlpParams& p, const Eigen::VectorXd& x) {
  return eval_jets(p, DenseMatrix(x.transpose()), 0).output(0, 0);
}

}  // namespace

TEST(Diffnet, JetsMatchFiniteDifferencesOnRandomNetworks) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + trial % 2;
    const auto p = random_net(rng, dim, trial % 3 == 0 ? Activation::adaptive_tanh : Activation::tanh);
    const auto pts = random_points(rng, 4, dim);
    const auto tape = eval_jets(p, pts, 2);
    const auto jets = to_jets(tape.output, tape.layout);
    double worst = 0, scale = 1e-3;
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
      for (int k = 0; k < dim; ++k) {
        auto along = [&](double t) {
          Eigen::VectorXd x = pts.row(i).transpose();
          x(k) += t;
          return net_value(p, x);
        };
        auto grad_along = [&](double t) {
          DenseMatrix x = pts.row(i);
          x(0, k) += t;
          const auto tp = eval_jets(p, x, 1);
          return to_jets(tp.output, tp.layout).grad(0, k);
        };
        const double g_fd = oracle::d1(along, 0.0, 1e-6);
        const double s_fd = oracle::d1(grad_along, 0.0, 1e-6);
        worst = std::max({worst, std::abs(jets.grad(i, k) - g_fd), std::abs(jets.second(i, k) - s_fd)});
        scale = std::max({scale, std::abs(g_fd), std::abs(s_fd)});
      }
    EXPECT_LT(worst / scale, 1e-5) << "trial " << trial;
  }
}

TEST(Diffnet, ParameterGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 12; ++trial) {
    const int dim = 1 + trial % 2;
    auto p = random_net(rng, dim, trial % 2 ? Activation::adaptive_tanh : Activation::tanh);
    const auto pts = random_points(rng, 5, dim);
    const int order = trial % 3;
    const auto tape = eval_jets(p, pts, order);
    std::normal_distribution<double> nd;
    DenseMatrix adj(1, tape.layout.cols());
    for (Eigen::Index j = 0; j < adj.cols(); ++j) adj(0, j) = nd(rng);
    const Vector g = param_gradient(p, tape, adj);
    const Vector theta = flatten(p);
    auto objective = [&](const Vector& th) {
      MlpParams q = p;
      unflatten(q, th);
      return (eval_jets(q, pts, order).output.array() * adj.array()).sum();
    };
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      auto along = [&](double t) {
        Vector th = theta;
        th(j) += t;
        return objective(th);
      };
      const double fd = oracle::d1(along, 0.0, 1e-6);
      EXPECT_NEAR(g(j), fd, 1e-5 * std::max(1.0, std::abs(fd))) << "trial " << trial << " param " << j;
    }
  }
}

TEST(Diffnet, SinglePrecisionTracksDouble) {
  std::mt19937_64 rng(13);
  const auto p = random_net(rng, 2, Activation::tanh);
  const auto pts = random_points(rng, 20, 2);
  const auto td = eval_jets(p, pts, 2);
  const auto tf = eval_jets(p.cast<float>(), pts, 2);
  EXPECT_LT((td.output - tf.output.cast<double>()).cwiseAbs().maxCoeff(), 1e-4 * td.output.cwiseAbs().maxCoeff() + 1e-5);
}

TEST(Diffnet, FlattenRoundTripAndCoeffOffset) {
  std::mt19937_64 rng(14);
  auto p = random_net(rng, 2, Activation::adaptive_tanh);
  const Vector flat = flatten(p);
  ASSERT_EQ(flat.size(), p.parameter_count());
  MlpParams q = p;
  unflatten(q, Vector::Zero(flat.size()));
  unflatten(q, flat);
  EXPECT_EQ(flatten(q), flat);
  EXPECT_EQ(flat.segment(coeff_offset(p), p.coeffs.size()), p.coeffs);
}

TEST(Diffnet, OutputIsLinearInCoefficients) {
  // u = c^T psi with no output bias
  std::mt19937_64 rng(15);
  auto p = random_net(rng, 1, Activation::tanh);
  const auto pts = random_points(rng, 6, 1);
  const auto tape = eval_jets(p, pts, 2);
  const Vector u = tape.basis().transpose() * p.coeffs;
  EXPECT_LT((u.transpose() - tape.output).norm(), 1e-12);
  p.coeffs.setZero();
  EXPECT_EQ(eval_jets(p, pts, 2).output.norm(), 0.0);
}

TEST(Diffnet, InitAndValidation) {
  const std::vector<int> widths = {2, 50, 50, 1};
  const auto a = init_params(widths, 7, Activation::tanh);
  const auto b = init_params(widths, 7, Activation::tanh);
  EXPECT_EQ(flatten(a), flatten(b));
  EXPECT_EQ(a.width(), 50);
  EXPECT_EQ(a.biases[0].norm(), 0.0);
  const double bound = std::sqrt(6.0 / (2 + 50));
  EXPECT_LE(a.weights[0].cwiseAbs().maxCoeff(), bound);

  auto bad = a;
  bad.coeffs.resize(3);
  EXPECT_THROW(validate(bad), std::invalid_argument);
  const std::vector<int> no_hidden = {1, 1};
  EXPECT_THROW(init_params(no_hidden, 0, Activation::tanh), std::invalid_argument);
  EXPECT_THROW(eval_jets(a, DenseMatrix::Zero(3, 1), 1), std::invalid_argument);
}
