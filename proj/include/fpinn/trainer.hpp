#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpinn/linalg.hpp"
#include "fpinn/optim.hpp"
#include "fpinn/problems.hpp"
#include "fpinn/surrogate.hpp"

namespace fpinn {

/// How S enters the LS system for nonlinear problems. picard moves S[u] of
/// the current model into the targets; newton also linearises it, adding
/// S'(u) psi_j to the rows and S'(u) u to the targets.
enum class NonlinearLs { picard, newton };

struct TrainingSchedule {
  // Fourier PINN (LS variant): initial solve, warm start, then outer rounds of
  // {inner LS rounds with pruning, gd_block Adam steps}, then L-BFGS.
  int warm_start_iters = 2000;
  int outer_rounds = 8;
  int inner_ls_rounds = 5;
  int gd_block_iters = 1000;
  // Every other variant: adam_iters Adam steps, then L-BFGS.
  int adam_iters = 10000;
  int lbfgs_iters = 500;

  double prune_threshold = 1e-4;  // delta; 0 disables pruning
  double reg_strength = 1e-4;     // alpha
  double boundary_weight = 1.0;   // lambda
  NonlinearLs nonlinear_ls = NonlinearLs::picard;
  AdamSettings adam;
  LbfgsSettings lbfgs;
  int history_every = 500;
};

void validate(const TrainingSchedule& s);

/// Thrown when optimisation produces non-finite values or the LS guard trips.
struct TrainingAborted : std::runtime_error {
  TrainingAborted(const std::string& phase, const std::string& what)
      : std::runtime_error(phase + ": " + what), phase(phase) {}
  std::string phase;
};

// Loss ------------------------------------------------------------------------

/// Parameter-independent pieces of the loss for one (model, problem, collocation).
struct LossContext {
  const PdeProblem* problem = nullptr;
  PointCache interior;
  PointCache boundary;
  Vector forcing;
  Vector boundary_values;
};

LossContext make_loss_context(const SurrogateModel& m, const PdeProblem& p, const CollocationSet& c);

struct LossValue {
  double total = 0.0;
  double boundary = 0.0;  // L_b (mean squared boundary misfit)
  double residual = 0.0;  // L_r (mean squared residual)
  double reg = 0.0;       // (alpha / 2) ||w||^2
};

/// lambda L_b + w_r L_r + (alpha/2)||w||^2. Strong-BC variants drop L_b;
/// only variants carrying a Fourier layer have w-regularisation. When `grad`
/// is given it receives the masked gradient over the flat parameter vector.
LossValue pinn_loss(const SurrogateModel& m, const LossContext& ctx, const TrainingSchedule& s, Vector* grad = nullptr);

// Least squares ---------------------------------------------------------------

/// Ridge system over w (see w_indices) with hidden parameters frozen. Residual
/// rows are scaled by sqrt(w_r/N), boundary rows by sqrt(lambda/M), and the
/// ridge strength is alpha/2, so the LS objective equals the training loss.
/// Nonlinear targets use S of the current model (see NonlinearLs).
RidgeProblem assemble_ls_system(const SurrogateModel& m, const LossContext& ctx, const TrainingSchedule& s);

/// Writes a solved w back into the model.
void write_w(SurrogateModel& m, const Vector& w);
Vector read_w(const SurrogateModel& m);

struct PruneEvent {
  long iter = 0;
  std::vector<int> removed_fourier;  // frequencies (1D) or beta entry indices (2D)
  std::vector<int> removed_nn;       // last-layer basis indices
};

/// Prunes |w_j| < delta: NN bases individually, 1D frequencies when
/// max(|a_n|, |b_n|) < delta, 2D beta entries individually.
PruneEvent prune_model(SurrogateModel& m, double delta);

struct LsReport {
  std::vector<double> target_drift;   // ||y^(r+1) - y^(r)|| per round after the first
  std::vector<double> stationarity;   // ridge stationarity per round
  std::vector<PruneEvent> prunes;
};

/// k rounds of {assemble, ridge solve, prune}. Throws TrainingAborted if ||w||
/// grows by more than 1e3x between rounds or every basis is pruned.
LsReport ls_fixed_point(SurrogateModel& m, const LossContext& ctx, const TrainingSchedule& s, int rounds, bool prune,
                        long iter = 0);

// Training --------------------------------------------------------------------

struct HistoryRow {
  long iter = 0;
  std::string phase;
  LossValue loss;
  double rel_l2 = 0.0;
};

struct TrainingHistory {
  std::vector<HistoryRow> rows;
  std::vector<PruneEvent> prune_events;
  std::vector<double> ls_drift;
  std::map<std::string, double> phase_seconds;
  std::string lbfgs_stop;
  double final_rel_l2 = 0.0;
};

struct TrainingData {
  CollocationSet collocation;
  DenseMatrix test_points;
  Vector test_truth;
};

struct TrainResult {
  SurrogateModel model;
  TrainingHistory history;
};

TrainResult train(const VariantSpec& variant, const PdeProblem& problem, const ModelConfig& model_cfg,
                  const TrainingSchedule& schedule, const TrainingData& data);
/// Continues training an existing model (used by tests to start from a given state).
TrainingHistory train_model(SurrogateModel& m, const PdeProblem& problem, const TrainingSchedule& schedule,
                            const TrainingData& data);

}  // namespace fpinn
