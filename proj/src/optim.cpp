#include "fpinn/optim.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace fpinn {

AdamState make_adam(Eigen::Index n, const AdamSettings& s) {
  if (!(s.lr0 > 0.0) || !(s.decay > 0.0 && s.decay <= 1.0) || s.decay_steps < 1)
    throw std::invalid_argument("make_adam: bad learning-rate schedule");
  return {s, 0, Vector::Zero(n), Vector::Zero(n)};
}

double adam_lr(const AdamSettings& s, long t) {
  return s.lr0 * std::pow(s.decay, static_cast<double>(t / s.decay_steps));
}

void adam_step(AdamState& st, Vector& params, const Vector& grad) {
  if (grad.size() != params.size() || st.m.size() != params.size())
    throw std::invalid_argument("adam_step: size mismatch");
  for (Eigen::Index i = 0; i < grad.size(); ++i)
    if (!std::isfinite(grad(i))) throw std::domain_error("adam_step: non-finite gradient at index " + std::to_string(i));
  const auto& s = st.settings;
  ++st.step;
  st.m = s.beta1 * st.m + (1.0 - s.beta1) * grad;
  st.v = s.beta2 * st.v + (1.0 - s.beta2) * grad.cwiseAbs2();
  const double t = static_cast<double>(st.step);
  const double bc1 = 1.0 - std::pow(s.beta1, t), bc2 = 1.0 - std::pow(s.beta2, t);
  const double lr = adam_lr(s, st.step);
  params.array() -= lr * (st.m.array() / bc1) / ((st.v.array() / bc2).sqrt() + s.eps);
}

void reset_moments(AdamState& st, Eigen::Index offset, Eigen::Index count) {
  st.m.segment(offset, count).setZero();
  st.v.segment(offset, count).setZero();
}

LbfgsTrace lbfgs_run(const LossGradFn& f, Vector& x, const LbfgsSettings& s, const IterationFn& observe) {
  LbfgsTrace tr;
  Vector g(x.size());
  double fx = f(x, g);
  tr.loss.push_back(fx);
  if (!std::isfinite(fx)) {
    tr.stop_reason = "non-finite loss at start";
    tr.line_search_failed = true;
    return tr;
  }
  std::deque<Vector> S, Y;
  std::deque<double> rho;
  Vector xn(x.size()), gn(x.size()), d(x.size());
  std::vector<double> alpha;

  for (int it = 0; it < s.max_iters; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= s.grad_tol) {
      tr.converged = true;
      tr.stop_reason = "gradient tolerance";
      return tr;
    }
    // two-loop recursion
    d = -g;
    alpha.assign(S.size(), 0.0);
    for (std::size_t i = S.size(); i-- > 0;) {
      alpha[i] = rho[i] * S[i].dot(d);
      d -= alpha[i] * Y[i];
    }
    if (!S.empty()) d *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    for (std::size_t i = 0; i < S.size(); ++i) {
      const double beta = rho[i] * Y[i].dot(d);
      d += (alpha[i] - beta) * S[i];
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      // not a descent direction: restart from steepest descent
      S.clear(), Y.clear(), rho.clear();
      d = -g;
      slope = -g.squaredNorm();
    }

    double step = S.empty() ? s.initial_step * std::min(1.0, 1.0 / g.lpNorm<1>()) : 1.0;
    double fn = 0.0;
    bool accepted = false;
    for (int h = 0; h <= s.max_halvings; ++h, step *= 0.5) {
      xn = x + step * d;
      fn = f(xn, gn);
      if (std::isfinite(fn) && fn <= fx + s.armijo * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      tr.line_search_failed = true;
      tr.stop_reason = "line search failed";
      return tr;
    }
    Vector sv = xn - x, yv = gn - g;
    const double sy = sv.dot(yv);
    if (sy > 1e-16 * sv.norm() * yv.norm() && sy > 0.0) {
      if (static_cast<int>(S.size()) == s.memory) S.pop_front(), Y.pop_front(), rho.pop_front();
      S.push_back(std::move(sv));
      Y.push_back(std::move(yv));
      rho.push_back(1.0 / sy);
    }
    const double rel = std::abs(fx - fn) / std::max({std::abs(fx), std::abs(fn), 1e-300});
    x = xn;
    g = gn;
    fx = fn;
    tr.loss.push_back(fx);
    ++tr.iterations;
    if (observe) observe(tr.iterations, fx);
    if (rel <= s.rel_tol) {
      tr.converged = true;
      tr.stop_reason = "relative loss change";
      return tr;
    }
  }
  tr.stop_reason = "max iterations";
  return tr;
}

}  // namespace fpinn
