#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "fbmg/coarse.hpp"
#include "fbmg/core.hpp"
#include "fbmg/dataterm.hpp"
#include "fbmg/transfer.hpp"

namespace fbmg {

/// When to perform a coarse correction at fine iteration k (0-based).
struct TriggerPolicy {
  struct Never {};
  /// Every iteration k < count.
  struct FirstKIterations { int count; };
  /// Iterations with k % period == 0.
  struct EveryNth { int period; };
  /// Every iteration until max_corrections corrections have been made.
  struct BudgetedCount { int max_corrections; };

  std::variant<Never, FirstKIterations, EveryNth, BudgetedCount> rule = Never{};

  static TriggerPolicy never() { return {Never{}}; }
  static TriggerPolicy first_k(int k) { return {FirstKIterations{k}}; }
  static TriggerPolicy every_nth(int period) { return {EveryNth{period}}; }
  static TriggerPolicy budgeted(int max_corrections) { return {BudgetedCount{max_corrections}}; }

  void validate() const;
  bool fires(int iteration, int corrections_so_far) const;
};

struct SolverConfig {
  double alpha = 0.85;
  /// Fine step; must lie in (0, 1/L).
  double tau = 0.95 / 8.0;
  /// Coarse step; requires 2 - tau_coarse * L_H > 0.
  double tau_coarse = 1.95 / 8.0;
  /// Coarse FB steps per correction.
  int coarse_steps = 6;
  /// Sufficient-decrease parameter in (0, 1); used by the descent probe.
  double kappa = 0.5;
  /// Scaling of the exact quadratic step in the line search.
  double omega = 0.4;
  /// Off: the candidate x + theta_bar d must be feasible. On: the candidate
  /// is projected onto the balls first and accepted when the objective does
  /// not increase.
  bool project_candidate = false;
  TriggerPolicy trigger = TriggerPolicy::never();
  int max_iter = 1000;
  double boundary_tol = kDefaultBoundaryTol;
  CoarseTolerances coarse_tol{};
  /// Optional stop: reference optimum and target relative error.
  std::optional<double> reference_value;
  std::optional<double> target_relative_error;

  /// Throws std::invalid_argument when the parameters are inconsistent with
  /// the Lipschitz constants L (fine) and L_H (coarse).
  void validate(double lipschitz, double lipschitz_coarse) const;
};

struct TraceRecord {
  int iter = 0;
  double icn = 0.0;
  double cpu_seconds = 0.0;
  double objective = 0.0;
  /// Set when a reference optimum is known.
  std::optional<double> relative;
  double theta = 0.0;
  bool coarse_correction = false;
};

struct SolveTrace {
  std::vector<TraceRecord> records;
  /// Coarse-to-fine pixel ratio N / n used for the comparison number.
  double coarse_ratio = 0.0;
  int coarse_steps = 0;

  /// Fills `relative` from a reference optimum; uses records[0] as v(x^0).
  void set_reference(double vstar);
};

/// Fine iterations plus coarse iterations weighted by N / n, one value per record.
std::vector<double> iteration_comparison_number(const SolveTrace& trace);

struct SolveResult {
  DualField x;
  SolveTrace trace;
};

/// One forward-backward step: project_balls(x - tau grad F(x), alpha).
DualField fb_step(const DualField& x, const DataTerm& dt, double alpha, double tau);

struct LineSearchOutcome {
  double theta = 0.0;
  bool accepted = false;
  double candidate_theta_bar = 0.0;
};

/// theta_bar = omega <T^{-1}(e - grad^* x), grad^* d> / |T^{-1/2} grad^* d|^2,
/// clamped at 0. Accepted when x + theta_bar d is feasible and does not
/// increase the dual objective; theta = 0 otherwise.
LineSearchOutcome line_search(const DualField& x, const DualField& d, const DataTerm& dt, double alpha,
                              double omega, double boundary_tol = kDefaultBoundaryTol);

/// Forward-backward multigrid from x0. Coarse corrections run whenever the
/// trigger fires; otherwise plain forward-backward steps.
SolveResult fbmg_solve(const DualField& x0, const DataTerm& dt, const SolverConfig& config);

/// Plain forward-backward: fbmg_solve with the trigger disabled.
SolveResult fb_solve(const DualField& x0, const DataTerm& dt, const SolverConfig& config);

/// |x - prox(x - tau grad F(x))|, zero exactly at fixed points.
double fixed_point_residual(const DualField& x, const DataTerm& dt, double alpha, double tau);

}  // namespace fbmg
