#pragma once

#include <Eigen/Dense>

namespace fpinn {

/// Value, gradient and pure second derivatives of a scalar field at one point.
struct Jet {
  double value = 0.0;
  Eigen::VectorXd grad;         // d/dx_i
  Eigen::VectorXd pure_second;  // d^2/dx_i^2

  Jet() = default;
  explicit Jet(Eigen::Index dim) : grad(Eigen::VectorXd::Zero(dim)), pure_second(Eigen::VectorXd::Zero(dim)) {}
};

/// Jets of a scalar field at N points: value(i), grad(i, k), second(i, k).
/// Columns of grad/second that were not requested are left empty (order < 1/2).
struct JetBatch {
  Eigen::VectorXd value;
  Eigen::MatrixXd grad;
  Eigen::MatrixXd second;

  JetBatch() = default;
  JetBatch(Eigen::Index n, Eigen::Index dim, int order)
      : value(Eigen::VectorXd::Zero(n)),
        grad(Eigen::MatrixXd::Zero(order >= 1 ? n : 0, order >= 1 ? dim : 0)),
        second(Eigen::MatrixXd::Zero(order >= 2 ? n : 0, order >= 2 ? dim : 0)) {}

  Eigen::Index size() const { return value.size(); }
  int order() const { return second.size() ? 2 : (grad.size() ? 1 : 0); }

  Jet at(Eigen::Index i) const {
    Jet j;
    j.value = value(i);
    j.grad = grad.size() ? Eigen::VectorXd(grad.row(i).transpose()) : Eigen::VectorXd();
    j.pure_second = second.size() ? Eigen::VectorXd(second.row(i).transpose()) : Eigen::VectorXd();
    return j;
  }

  JetBatch& operator+=(const JetBatch& o) {
    value += o.value;
    if (grad.size()) grad += o.grad;
    if (second.size()) second += o.second;
    return *this;
  }
};

}  // namespace fpinn
