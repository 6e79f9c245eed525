#include "fpinn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "fpinn/analysis.hpp"

namespace fpinn {

void validate(const TrainingSchedule& s) {
  if (s.warm_start_iters < 0 || s.outer_rounds < 0 || s.inner_ls_rounds < 0 || s.gd_block_iters < 0 ||
      s.adam_iters < 0 || s.lbfgs_iters < 0)
    throw std::invalid_argument("TrainingSchedule: iteration counts must be >= 0");
  if (!(s.prune_threshold >= 0.0)) throw std::invalid_argument("TrainingSchedule: prune threshold must be >= 0");
  if (!(s.reg_strength >= 0.0)) throw std::invalid_argument("TrainingSchedule: regularisation must be >= 0");
  if (!(s.boundary_weight > 0.0)) throw std::invalid_argument("TrainingSchedule: boundary weight must be > 0");
  if (s.history_every < 1) throw std::invalid_argument("TrainingSchedule: history_every must be >= 1");
}

LossContext make_loss_context(const SurrogateModel& m, const PdeProblem& p, const CollocationSet& c) {
  LossContext ctx;
  ctx.problem = &p;
  ctx.interior = make_cache(m, c.interior, p.required_order());
  ctx.boundary = make_cache(m, c.boundary, 0);
  ctx.forcing = c.forcing;
  ctx.boundary_values = c.boundary_values;
  return ctx;
}

namespace {

double residual_weight(const SurrogateModel& m) {
  return m.variant.tag == VariantTag::w_pinn ? m.variant.residual_weight : 1.0;
}

[[noreturn]] void non_finite(const Vector& r, const char* where) {
  Eigen::Index bad = 0;
  while (bad < r.size() && std::isfinite(r(bad))) ++bad;
  throw TrainingAborted("loss", std::string("non-finite ") + where + " at point index " + std::to_string(bad));
}

}  // namespace

LossValue pinn_loss(const SurrogateModel& m, const LossContext& ctx, const TrainingSchedule& s, Vector* grad) {
  const PdeProblem& p = *ctx.problem;
  const double wr = residual_weight(m);
  LossValue L;

  const Evaluation ei = evaluate(m, ctx.interior);
  const auto parts = apply_operator(p, ei.u);
  const Vector r = parts.linear + parts.nonlinear - ctx.forcing;
  const auto n = static_cast<double>(r.size());
  L.residual = r.squaredNorm() / n;
  if (!std::isfinite(L.residual)) non_finite(r, "residual");
  L.total = wr * L.residual;

  Evaluation eb;
  Vector rb;
  if (!m.strong()) {
    eb = evaluate(m, ctx.boundary);
    rb = eb.u.value - ctx.boundary_values;
    L.boundary = rb.squaredNorm() / static_cast<double>(rb.size());
    if (!std::isfinite(L.boundary)) non_finite(rb, "boundary misfit");
    L.total += s.boundary_weight * L.boundary;
  }

  Vector params;
  std::vector<Eigen::Index> widx;
  if (m.has_fourier() && s.reg_strength > 0.0) {
    params = get_params(m);
    widx = w_indices(m);
    double sq = 0.0;
    for (auto i : widx) sq += params(i) * params(i);
    L.reg = 0.5 * s.reg_strength * sq;
    L.total += L.reg;
  }

  if (grad) {
    const auto& op = p.linear;
    const auto& lay = ctx.interior.layout;
    const double scale = 2.0 * wr / n;
    JetBatch ub(lay.points, lay.dim, lay.order);
    for (Eigen::Index i = 0; i < r.size(); ++i)
      ub.value(i) = scale * r(i) * (op.value_coeff + nonlinear_derivative(p.nonlinear, ei.u.value(i)));
    for (Eigen::Index k = 0; k < lay.dim && lay.order >= 1; ++k) {
      if (op.grad_coeffs.size()) ub.grad.col(k) = scale * op.grad_coeffs(k) * r;
      if (lay.order >= 2 && op.second_coeffs.size()) ub.second.col(k) = scale * op.second_coeffs(k) * r;
    }
    *grad = backward(m, ctx.interior, ei, ub);
    if (!m.strong()) {
      JetBatch bb(rb.size(), lay.dim, 0);
      bb.value = (2.0 * s.boundary_weight / static_cast<double>(rb.size())) * rb;
      *grad += backward(m, ctx.boundary, eb, bb);
    }
    for (auto i : widx) (*grad)(i) += s.reg_strength * params(i);
    mask_gradient(m, *grad);
  }
  return L;
}

// ---------------------------------------------------------------------------

RidgeProblem assemble_ls_system(const SurrogateModel& m, const LossContext& ctx, const TrainingSchedule& s) {
  const PdeProblem& p = *ctx.problem;
  const Eigen::Index cols = m.w_count();
  if (cols == 0) throw std::invalid_argument("assemble_ls_system: every basis has been pruned");

  const Evaluation ei = evaluate(m, ctx.interior);
  const BasisJets bi = basis_jets(m, ctx.interior, ei);
  const DenseMatrix gi = apply_linear(p.linear, bi.value, bi.grad, bi.second);
  DenseMatrix gi_rows = gi;
  Vector sv = ei.u.value.unaryExpr([&](double u) { return nonlinear_term(p.nonlinear, u); });
  if (s.nonlinear_ls == NonlinearLs::newton && p.nonlinear != NonlinearKind::none) {
    const Vector sd = ei.u.value.unaryExpr([&](double u) { return nonlinear_derivative(p.nonlinear, u); });
    gi_rows += sd.asDiagonal() * bi.value;
    sv -= sd.cwiseProduct(ei.u.value);
  }
  const Eigen::Index n = gi.rows();
  const double rs = std::sqrt(residual_weight(m) / static_cast<double>(n));

  Eigen::Index mrows = 0;
  BasisJets bb;
  if (!m.strong()) {
    const Evaluation eb = evaluate(m, ctx.boundary);
    bb = basis_jets(m, ctx.boundary, eb);
    mrows = bb.value.rows();
  }

  RidgeProblem rp;
  rp.design.resize(n + mrows, cols);
  rp.targets.resize(n + mrows);
  rp.design.topRows(n) = rs * gi_rows;
  rp.targets.head(n) = rs * (ctx.forcing - sv);
  if (mrows > 0) {
    const double bs = std::sqrt(s.boundary_weight / static_cast<double>(mrows));
    rp.design.bottomRows(mrows) = bs * bb.value;
    rp.targets.tail(mrows) = bs * ctx.boundary_values;
  }
  rp.reg_strength = 0.5 * s.reg_strength;
  return rp;
}

Vector read_w(const SurrogateModel& m) {
  const Vector params = get_params(m);
  const auto idx = w_indices(m);
  Vector w(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) w(static_cast<Eigen::Index>(i)) = params(idx[i]);
  return w;
}

void write_w(SurrogateModel& m, const Vector& w) {
  Vector params = get_params(m);
  const auto idx = w_indices(m);
  if (static_cast<Eigen::Index>(idx.size()) != w.size()) throw std::invalid_argument("write_w: size mismatch");
  for (std::size_t i = 0; i < idx.size(); ++i) params(idx[i]) = w(static_cast<Eigen::Index>(i));
  set_params(m, params);
}

PruneEvent prune_model(SurrogateModel& m, double delta) {
  PruneEvent ev;
  if (!(delta > 0.0)) return ev;
  if (m.has_net()) {
    for (std::size_t j = 0; j < m.nn_active.size(); ++j) {
      auto& c = m.net.coeffs(static_cast<Eigen::Index>(j));
      if (m.nn_active[j] && std::abs(c) < delta) {
        m.nn_active[j] = 0;
        c = 0.0;
        ev.removed_nn.push_back(static_cast<int>(j));
      }
    }
  }
  if (m.has_fourier()) {
    if (m.dim == 1) {
      auto [layer, report] = prune_bases(m.fourier1d, delta);
      m.fourier1d = std::move(layer);
      ev.removed_fourier = std::move(report.removed_freqs);
    } else {
      auto& f = m.fourier2d;
      for (std::size_t j = 0; j < f.active.size(); ++j)
        if (f.active[j] && std::abs(f.beta(static_cast<Eigen::Index>(j))) < delta)
          ev.removed_fourier.push_back(static_cast<int>(j));
      prune_tensor(f, delta);
    }
  }
  return ev;
}

LsReport ls_fixed_point(SurrogateModel& m, const LossContext& ctx, const TrainingSchedule& s, int rounds, bool prune,
                        long iter) {
  if (rounds < 1) throw std::invalid_argument("ls_fixed_point: rounds must be >= 1");
  LsReport rep;
  Vector prev_targets;
  double prev_norm = -1.0;
  for (int r = 0; r < rounds; ++r) {
    if (m.w_count() == 0) throw TrainingAborted("ls", "every basis has been pruned");
    const RidgeProblem rp = assemble_ls_system(m, ctx, s);
    if (r > 0) rep.target_drift.push_back((rp.targets - prev_targets).norm());
    RidgeSolution sol;
    try {
      sol = ridge_solve(rp);
    } catch (const std::invalid_argument& e) {
      throw TrainingAborted("ls", e.what());
    }
    rep.stationarity.push_back(ridge_stationarity(rp, sol.w));
    const double norm = sol.w.norm();
    if (prev_norm > 0.0 && norm > 1e3 * prev_norm)
      throw TrainingAborted("ls", "coefficient norm grew by more than 1e3x between rounds");
    prev_norm = norm;
    write_w(m, sol.w);
    if (prune) {
      PruneEvent ev = prune_model(m, s.prune_threshold);
      ev.iter = iter;
      if (!ev.removed_fourier.empty() || !ev.removed_nn.empty()) rep.prunes.push_back(std::move(ev));
    }
    prev_targets = rp.targets;
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

// Keeps network moments, zeroes everything else (w changed under the optimiser).
void rebase_adam(AdamState& st, const SurrogateModel& m) {
  AdamState fresh = make_adam(m.parameter_count(), st.settings);
  fresh.step = st.step;
  const Eigen::Index keep = std::min(m.net_count(), st.m.size());
  fresh.m.head(keep) = st.m.head(keep);
  fresh.v.head(keep) = st.v.head(keep);
  if (m.has_net()) reset_moments(fresh, m.c_offset(), m.net.width());
  st = std::move(fresh);
}

}  // namespace

TrainingHistory train_model(SurrogateModel& m, const PdeProblem& problem, const TrainingSchedule& s,
                            const TrainingData& data) {
  validate(s);
  const LossContext ctx = make_loss_context(m, problem, data.collocation);
  TrainingHistory h;
  long it = 0;

  auto rel = [&]() { return relative_l2(predict(m, data.test_points), data.test_truth); };
  auto record = [&](const std::string& phase) {
    h.rows.push_back({it, phase, pinn_loss(m, ctx, s), rel()});
  };
  auto timed = [&](const std::string& phase, auto&& fn) {
    const auto t0 = Clock::now();
    fn();
    h.phase_seconds[phase] += std::chrono::duration<double>(Clock::now() - t0).count();
  };

  AdamState adam = make_adam(m.parameter_count(), s.adam);
  auto run_adam = [&](int iters, const std::string& phase) {
    timed(phase, [&] {
      Vector x = get_params(m), g;
      for (int i = 0; i < iters; ++i) {
        pinn_loss(m, ctx, s, &g);
        try {
          adam_step(adam, x, g);
        } catch (const std::domain_error& e) {
          throw TrainingAborted(phase, e.what());
        }
        set_params(m, x);
        ++it;
        if (it % s.history_every == 0) record(phase);
      }
    });
  };
  auto run_ls = [&](int rounds, bool prune) {
    timed("ls", [&] {
      LsReport rep = ls_fixed_point(m, ctx, s, rounds, prune, it);
      h.ls_drift.insert(h.ls_drift.end(), rep.target_drift.begin(), rep.target_drift.end());
      for (auto& ev : rep.prunes) h.prune_events.push_back(std::move(ev));
      rebase_adam(adam, m);
      record("ls");
    });
  };

  record("init");
  if (m.variant.uses_ls()) {
    // w is about to be solved for; starting from zero makes the first
    // nonlinear linearisation point u = 0 instead of a random network.
    write_w(m, Vector::Zero(m.w_count()));
    run_ls(1, false);
    run_adam(s.warm_start_iters, "warm_start");
    for (int o = 0; o < s.outer_rounds; ++o) {
      run_ls(s.inner_ls_rounds > 0 ? s.inner_ls_rounds : 1, s.prune_threshold > 0.0 && s.inner_ls_rounds > 0);
      run_adam(s.gd_block_iters, "adam");
    }
  } else {
    run_adam(s.adam_iters, "adam");
  }

  if (s.lbfgs_iters > 0) {
    timed("lbfgs", [&] {
      Vector x = get_params(m);
      LbfgsSettings ls = s.lbfgs;
      ls.max_iters = s.lbfgs_iters;
      const long base = it;
      auto f = [&](const Vector& xv, Vector& g) {
        set_params(m, xv);
        try {
          return pinn_loss(m, ctx, s, &g).total;
        } catch (const TrainingAborted&) {
          g = Vector::Zero(xv.size());
          return std::numeric_limits<double>::quiet_NaN();
        }
      };
      // lbfgs_run updates x in place before calling the observer
      auto observe = [&](int k, double) {
        set_params(m, x);
        it = base + k;
        if (it % s.history_every == 0) record("lbfgs");
      };
      const LbfgsTrace tr = lbfgs_run(f, x, ls, observe);
      set_params(m, x);
      it = base + tr.iterations;
      h.lbfgs_stop = tr.stop_reason;
    });
  }
  record("final");
  h.final_rel_l2 = h.rows.back().rel_l2;
  return h;
}

TrainResult train(const VariantSpec& variant, const PdeProblem& problem, const ModelConfig& model_cfg,
                  const TrainingSchedule& schedule, const TrainingData& data) {
  TrainResult r{make_model(variant, problem, model_cfg), {}};
  r.history = train_model(r.model, problem, schedule, data);
  return r;
}

}  // namespace fpinn
