#pragma once

// Post-hoc checks on a finished trajectory. Everything here is recomputed
// from the stored states; the residuals the integrator recorded are never
// reused, so the report doubles as an independent audit of the run.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nhvi/discretization.hpp"
#include "nhvi/integrator.hpp"

namespace nhvi {

struct EnergySample {
  double t = 0.0;
  double energy = 0.0;
  bool impact = false;  ///< sample taken at an impact node (q~, v~)
};

struct IterationStats {
  double mean = 0.0;
  int max = 0;
};

struct RunReport {
  long impact_count = 0;
  std::vector<double> impact_times;
  double energy_initial = 0.0;
  double energy_final = 0.0;
  double energy_drift_rel = 0.0;  ///< max_k |E_k - E_0| / max(1, |E_0|)
  double max_energy_jump = 0.0;
  double max_constraint_residual = 0.0;  ///< ||omega_d+||_inf over states and impact nodes
  double max_momentum_residual = 0.0;    ///< ||D1 L_d + p - omega^T lambda||_inf over states
  double min_boundary_gap = 0.0;
  IterationStats newton_iter_stats;
  long steps = 0;
};

namespace detail {
inline void require_nonempty(const Trajectory& traj) {
  if (traj.states.empty()) {
    throw Error(ErrorKind::InvalidInitialState, "trajectory has no states");
  }
}
}  // namespace detail

/// Discrete energy -D3 L_d along the trajectory, in time order. Each state
/// is evaluated with the step it was paired with; an impact adds a node at
/// t~ evaluated on (q~, v~, (1 - alpha) h).
[[nodiscard]] inline std::vector<EnergySample> energy_series(const Trajectory& traj,
                                                             const DiscreteLagrangian& ld) {
  detail::require_nonempty(traj);
  std::vector<EnergySample> out;
  out.reserve(traj.states.size() + traj.impacts.size());
  auto impact = traj.impacts.begin();
  for (const State& s : traj.states) {
    out.push_back({s.t, discrete_energy(ld, s.q, s.v, s.step), false});
    while (impact != traj.impacts.end() && impact->k == s.k) {
      const double s_post = (1.0 - impact->alpha) * traj.h;
      out.push_back(
          {impact->t_impact, discrete_energy(ld, impact->q_tilde, impact->v_tilde, s_post), true});
      ++impact;
    }
  }
  return out;
}

/// ||omega_d+(q_k, v_k)||_inf for every state, using the step stored with it.
[[nodiscard]] inline std::vector<double> constraint_residuals(const Trajectory& traj,
                                                              const MechanicalModel& model) {
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const State& s : traj.states) out.push_back(detail::omega_residual(model, s.q, s.v, s.step));
  return out;
}

/// ||D1 L_d(q_k, v_k, step) + p_k - omega(q_k)^T lambda_k||_inf for one state.
/// State 0 is never solved for, so its residual only reflects the initial data.
[[nodiscard]] inline double momentum_residual(const DiscreteLagrangian& ld, const State& s) {
  const Matrix w = ld.model().omega(s.q);
  Vector r = ld.d1(s.q, s.v, s.step) + s.p;
  if (w.rows() > 0) r -= w.transpose() * s.lambda;
  return inf_norm(r);
}

[[nodiscard]] inline RunReport build_report(const Trajectory& traj, const DiscreteLagrangian& ld,
                                            const MechanicalModel& model) {
  detail::require_nonempty(traj);
  RunReport rep;
  rep.steps = static_cast<long>(traj.states.size()) - 1;
  rep.impact_count = static_cast<long>(traj.impacts.size());
  for (const ImpactEvent& ev : traj.impacts) rep.impact_times.push_back(ev.t_impact);

  const auto energy = energy_series(traj, ld);
  rep.energy_initial = energy.front().energy;
  rep.energy_final = energy.back().energy;
  const double scale = std::max(1.0, std::abs(rep.energy_initial));
  for (const EnergySample& e : energy) {
    rep.energy_drift_rel =
        std::max(rep.energy_drift_rel, std::abs(e.energy - rep.energy_initial) / scale);
  }

  rep.min_boundary_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const State& s = traj.states[i];
    rep.min_boundary_gap = std::min(rep.min_boundary_gap, model.boundary_gap(s.q));
    rep.max_constraint_residual =
        std::max(rep.max_constraint_residual, detail::omega_residual(model, s.q, s.v, s.step));
    if (i > 0) rep.max_momentum_residual = std::max(rep.max_momentum_residual, momentum_residual(ld, s));
  }
  for (const ImpactEvent& ev : traj.impacts) {
    const double s_pre = ev.alpha * traj.h;
    const double s_post = (1.0 - ev.alpha) * traj.h;
    rep.max_constraint_residual = std::max(
        rep.max_constraint_residual, detail::omega_residual(model, ev.q_tilde, ev.v_tilde, s_post));
    const State& pre = traj.states[static_cast<std::size_t>(ev.k)];
    const double jump = std::abs(ld.d3(pre.q, ev.q_tilde, s_pre) -
                                 ld.d3(ev.q_tilde, ev.v_tilde, s_post));
    rep.max_energy_jump = std::max(rep.max_energy_jump, jump);
  }

  long total = 0;
  long counted = 0;
  for (const StepStats& st : traj.solver_stats) {
    if (st.k == 0) continue;
    total += st.iterations;
    ++counted;
    rep.newton_iter_stats.max = std::max(rep.newton_iter_stats.max, st.iterations);
  }
  rep.newton_iter_stats.mean = counted > 0 ? static_cast<double>(total) / counted : 0.0;
  return rep;
}

}  // namespace nhvi
