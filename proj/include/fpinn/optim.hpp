#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fpinn/linalg.hpp"

namespace fpinn {

struct AdamSettings {
  double lr0 = 1e-3;
  double decay = 0.9;
  long decay_steps = 1000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamSettings settings;
  long step = 0;
  Vector m;
  Vector v;
};

AdamState make_adam(Eigen::Index n, const AdamSettings& s = {});
/// lr0 * decay^floor(t / decay_steps)
double adam_lr(const AdamSettings& s, long t);
/// One bias-corrected Adam update in place. Throws std::domain_error on a
/// non-finite gradient, naming the first offending index.
void adam_step(AdamState& state, Vector& params, const Vector& grad);
/// Zeroes both moments on [offset, offset + count).
void reset_moments(AdamState& state, Eigen::Index offset, Eigen::Index count);

struct LbfgsSettings {
  int memory = 20;
  int max_iters = 1000;
  double grad_tol = 1e-9;
  double rel_tol = 1e-12;
  double armijo = 1e-4;
  int max_halvings = 40;
  double initial_step = 1e-2;  // first trial step length; later trials start at 1
};

struct LbfgsTrace {
  std::vector<double> loss;  // loss[0] at the start point, then one per accepted step
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
  std::string stop_reason;
};

/// Returns the loss and writes the gradient.
using LossGradFn = std::function<double(const Vector& x, Vector& grad)>;
/// Optional per-iteration observer (iteration, loss).
using IterationFn = std::function<void(int, double)>;

/// Two-loop recursion with backtracking Armijo search. Pairs failing
/// s^T y > 0 are skipped. On line-search failure the best point so far is kept.
LbfgsTrace lbfgs_run(const LossGradFn& f, Vector& x, const LbfgsSettings& s = {}, const IterationFn& observe = {});

}  // namespace fpinn
