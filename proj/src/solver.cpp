#include "fbmg/solver.hpp"

#include <cmath>
#include <ctime>
#include <stdexcept>
#include <string>

#include "fbmg/tv_ops.hpp"

namespace fbmg {

void TriggerPolicy::validate() const {
  std::visit(
      [](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, FirstKIterations>) {
          if (r.count <= 0) throw std::invalid_argument("trigger: first-k count must be positive");
        } else if constexpr (std::is_same_v<R, EveryNth>) {
          if (r.period <= 0) throw std::invalid_argument("trigger: period must be positive");
        } else if constexpr (std::is_same_v<R, BudgetedCount>) {
          if (r.max_corrections <= 0) throw std::invalid_argument("trigger: budget must be positive");
        }
      },
      rule);
}

bool TriggerPolicy::fires(int iteration, int corrections_so_far) const {
  return std::visit(
      [&](const auto& r) -> bool {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, Never>) {
          return false;
        } else if constexpr (std::is_same_v<R, FirstKIterations>) {
          return iteration < r.count;
        } else if constexpr (std::is_same_v<R, EveryNth>) {
          return iteration % r.period == 0;
        } else {
          return corrections_so_far < r.max_corrections;
        }
      },
      rule);
}

void SolverConfig::validate(double lipschitz, double lipschitz_coarse) const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("solver config: " + what); };
  if (!(alpha > 0.0)) fail("alpha must be positive");
  if (!(tau > 0.0 && tau * lipschitz < 1.0)) fail("tau must lie in (0, 1/L)");
  if (!(kappa > 0.0 && kappa < 1.0)) fail("kappa must lie in (0, 1)");
  if (!(omega > 0.0)) fail("omega must be positive");
  if (coarse_steps < 0) fail("coarse step count must be non-negative");
  if (max_iter < 0) fail("max_iter must be non-negative");
  if (!(boundary_tol >= 0.0)) fail("boundary_tol must be non-negative");
  trigger.validate();
  if (!std::holds_alternative<TriggerPolicy::Never>(trigger.rule)) {
    if (!(tau_coarse > 0.0 && 2.0 - tau_coarse * lipschitz_coarse > 0.0))
      fail("coarse step needs 2 - tau_H L_H > 0");
  }
  if (target_relative_error && !reference_value) fail("target relative error needs a reference value");
}

void SolveTrace::set_reference(double vstar) {
  if (records.empty()) return;
  const double v0 = records.front().objective;
  for (TraceRecord& r : records) r.relative = relative_error(r.objective, v0, vstar);
}

std::vector<double> iteration_comparison_number(const SolveTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.records.size());
  int corrections = 0;
  for (const TraceRecord& r : trace.records) {
    if (r.coarse_correction) ++corrections;
    out.push_back(r.iter + trace.coarse_ratio * trace.coarse_steps * corrections);
  }
  return out;
}

namespace {

DualField fb_update(const DualField& z, const DualField& grad, double alpha, double tau) {
  DualField out(z.shape);
  for (std::size_t i = 0; i < z.size(); ++i)
    out.values[i] = project_ball(z.values[i] - tau * grad.values[i], alpha);
  return out;
}

bool is_zero(const ImageField& f) {
  for (double v : f.values)
    if (v != 0.0) return false;
  return true;
}

struct LineSearchState {
  LineSearchOutcome outcome;
  DualField candidate;
  SmoothEval at_candidate;
};

// Uses that F is quadratic along d: with w = T^{-1} grad^* d the primal image
// at x + theta d is primal(x) - theta w.
LineSearchState line_search_from(const DualField& x, const SmoothEval& at_x, const DualField& d,
                                 const DataTerm& dt, double alpha, double omega, double boundary_tol,
                                 bool project_candidate) {
  LineSearchState st;
  const ImageField div_d = divergence_adjoint(d);
  if (is_zero(div_d)) {
    st.outcome = {0.0, true, 0.0};
    return st;
  }
  const ImageField w = dt.apply_T_inv(div_d);
  const double curvature = inner(div_d, w);
  const double slope = inner(at_x.primal, div_d);
  const double theta_bar = curvature > 0.0 ? std::max(0.0, omega * slope / curvature) : 0.0;
  st.outcome.candidate_theta_bar = theta_bar;
  if (theta_bar == 0.0) {
    st.outcome.accepted = true;
    return st;
  }
  if (project_candidate) {
    st.candidate = project_balls(axpy(x, theta_bar, d), alpha);
    st.at_candidate = evaluate_smooth(st.candidate, dt);
    if (!(st.at_candidate.value <= at_x.value)) return st;
    st.outcome.theta = theta_bar;
    st.outcome.accepted = true;
    return st;
  }
  st.candidate = axpy(x, theta_bar, d);
  if (!is_feasible(st.candidate, alpha, boundary_tol)) return st;
  const double value = at_x.value - theta_bar * slope + 0.5 * theta_bar * theta_bar * curvature;
  if (!(value <= at_x.value)) return st;

  st.outcome.theta = theta_bar;
  st.outcome.accepted = true;
  st.at_candidate.primal = axpy(at_x.primal, -theta_bar, w);
  st.at_candidate.gradient = gradient(st.at_candidate.primal);
  for (Vec2& v : st.at_candidate.gradient.values) v = -v;
  st.at_candidate.value = value;
  return st;
}

double cpu_now() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

}  // namespace

DualField fb_step(const DualField& x, const DataTerm& dt, double alpha, double tau) {
  return fb_update(x, smooth_dual_gradient(x, dt), alpha, tau);
}

LineSearchOutcome line_search(const DualField& x, const DualField& d, const DataTerm& dt, double alpha,
                              double omega, double boundary_tol) {
  if (!(x.shape == d.shape)) throw std::invalid_argument("line_search: shape mismatch");
  return line_search_from(x, evaluate_smooth(x, dt), d, dt, alpha, omega, boundary_tol, false).outcome;
}

SolveResult fbmg_solve(const DualField& x0, const DataTerm& dt, const SolverConfig& config) {
  if (!(x0.shape == dt.shape())) throw std::invalid_argument("fbmg_solve: x0 shape does not match data term");
  const bool multigrid = !std::holds_alternative<TriggerPolicy::Never>(config.trigger.rule);

  std::optional<GridTransfer> transfer;
  std::optional<DataTerm> coarse_dt;
  if (multigrid) {
    transfer.emplace(dt.shape());
    coarse_dt.emplace(dt.coarsen(*transfer));
  }
  config.validate(dt.lipschitz(), coarse_dt ? coarse_dt->lipschitz() : 0.0);
  if (!is_feasible(x0, config.alpha, config.boundary_tol))
    throw std::invalid_argument("fbmg_solve: initial iterate is infeasible");

  SolveResult result{x0, {}};
  SolveTrace& trace = result.trace;
  trace.coarse_steps = config.coarse_steps;
  trace.coarse_ratio = transfer ? static_cast<double>(transfer->coarse().size()) / dt.shape().size()
                                : 0.25;

  double cpu = 0.0;
  double t0 = cpu_now();
  SmoothEval ev = evaluate_smooth(result.x, dt);
  cpu += cpu_now() - t0;

  auto relative_of = [&](double v) -> std::optional<double> {
    if (!config.reference_value) return std::nullopt;
    return relative_error(v, trace.records.empty() ? v : trace.records.front().objective, *config.reference_value);
  };
  const double v0 = ev.value;
  trace.records.push_back({0, 0.0, cpu, v0, std::nullopt, 0.0, false});
  if (config.reference_value) trace.records.back().relative = relative_error(v0, v0, *config.reference_value);

  int corrections = 0;
  for (int k = 0; k < config.max_iter; ++k) {
    if (config.target_relative_error && trace.records.back().relative &&
        *trace.records.back().relative <= *config.target_relative_error)
      break;

    t0 = cpu_now();
    DualField& x = result.x;
    TraceRecord rec;
    rec.iter = k + 1;
    if (multigrid && config.trigger.fires(k, corrections)) {
      const CoarseModel model =
          build_coarse_model(x, ev.gradient, *coarse_dt, *transfer, config.alpha, config.coarse_tol);
      const CoarseRun run = coarse_fb_iterate(model, config.coarse_steps, config.tau_coarse);
      const DualField d = transfer->prolong(axpy(run.zeta, -1.0, model.anchor));
      LineSearchState ls = line_search_from(x, ev, d, dt, config.alpha, config.omega, config.boundary_tol,
                                              config.project_candidate);
      ++corrections;
      rec.coarse_correction = true;
      rec.theta = ls.outcome.theta;
      if (ls.outcome.theta > 0.0) {
        x = std::move(ls.candidate);
        ev = std::move(ls.at_candidate);
      }
    }
    x = fb_update(x, ev.gradient, config.alpha, config.tau);
    ev = evaluate_smooth(x, dt);
    cpu += cpu_now() - t0;

    rec.cpu_seconds = cpu;
    rec.objective = ev.value;
    rec.icn = rec.iter + trace.coarse_ratio * config.coarse_steps * corrections;
    rec.relative = relative_of(ev.value);
    trace.records.push_back(rec);
  }
  return result;
}

SolveResult fb_solve(const DualField& x0, const DataTerm& dt, const SolverConfig& config) {
  SolverConfig plain = config;
  plain.trigger = TriggerPolicy::never();
  return fbmg_solve(x0, dt, plain);
}

double fixed_point_residual(const DualField& x, const DataTerm& dt, double alpha, double tau) {
  return std::sqrt(squared_norm(axpy(x, -1.0, fb_step(x, dt, alpha, tau))));
}

}  // namespace fbmg
