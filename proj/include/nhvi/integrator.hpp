#pragma once

// Forward time stepping of the discrete nonholonomic implicit Euler-Lagrange
// equations with elastic impact resolution.
//
// A smooth step maps (q_k, v_k, p_k) to
//   p_{k+1} = D2 L_d(q_k, v_k, h),  q_{k+1} = v_k,
//   D1 L_d(q_{k+1}, v_{k+1}, h) + p_{k+1} = lambda . omega(q_{k+1}),
//   omega_d+(q_{k+1}, v_{k+1}) = 0.
// When q_{k+1} would leave the admissible set the step is replaced by an
// impact solve split at the fractional time alpha*h.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nhvi/discretization.hpp"
#include "nhvi/errors.hpp"
#include "nhvi/geometry.hpp"
#include "nhvi/numerics.hpp"

namespace nhvi {

/// One node of a discrete trajectory.
struct State {
  long k = 0;
  double t = 0.0;
  Vector q;       ///< configuration q_k
  Vector v;       ///< next-position slot v_k (equals q_{k+1}, or q~ before an impact)
  Vector p;       ///< momentum p_k
  Vector lambda;  ///< constraint multipliers
  double step = 0.0;  ///< timestep paired with (q, v): h, or alpha*h before an impact
};

struct ImpactEvent {
  long k = 0;  ///< step in which the penetration was detected
  double alpha = 0.0;
  double t_impact = 0.0;
  Vector q_tilde;
  Vector v_tilde;
  Vector p_tilde;  ///< boundary covector, coefficients against the dual basis of E
  Vector lambda_A;
  Vector lambda_B;
  double compat_residual = 0.0;  ///< ||P^T p~ - D2 L_d(q_k, v_k, alpha h)||_inf
  double energy_jump = 0.0;      ///< |D3 before - D3 after|
  double constraint_residual = 0.0;  ///< ||omega_d+(q~, v~)||_inf with (1-alpha)h
};

/// Newton bookkeeping for the solve that produced (v, lambda) of a state.
struct StepStats {
  long k = 0;
  int iterations = 0;
  double residual = 0.0;             ///< final Newton residual (inf norm)
  double constraint_residual = 0.0;  ///< ||omega_d+(q_k, v_k)||_inf at acceptance
  bool impact = false;               ///< state produced or modified by an impact solve
};

struct Trajectory {
  double h = 0.0;
  std::vector<State> states;
  std::vector<ImpactEvent> impacts;
  std::vector<StepStats> solver_stats;  ///< parallel to states
};

enum class TraceLevel { Info, Debug };
using TraceSink = std::function<void(TraceLevel, const std::string&)>;

/// How the boundary momentum p~ is obtained from D2 L_d(q_k, v_k, alpha h).
enum class MomentumTransfer {
  /// Least-squares solution of P^T p~ = D2 L_d, p~ = (P P^T)^{-1} P D2 L_d.
  LeastSquares,
  /// Pullback of D2 L_d to the boundary, p~ = E^T D2 L_d.
  Pullback,
};

[[nodiscard]] inline std::string_view to_string(MomentumTransfer m) {
  return m == MomentumTransfer::LeastSquares ? "least-squares" : "pullback";
}

[[nodiscard]] inline MomentumTransfer momentum_transfer_from_string(std::string_view s) {
  if (s == "least-squares") return MomentumTransfer::LeastSquares;
  if (s == "pullback") return MomentumTransfer::Pullback;
  throw Error(ErrorKind::SchemaError, "unknown momentum transfer '" + std::string(s) + "'");
}

struct IntegratorOptions {
  NewtonOptions newton{};
  MomentumTransfer transfer = MomentumTransfer::LeastSquares;
  double grazing_tol = 1e-12;  ///< c(q) >= -grazing_tol counts as admissible
  double alpha_eps = 1e-6;     ///< alpha must lie in (alpha_eps, 1 - alpha_eps)
  TraceSink trace{};
};

struct BackwardStep {
  Vector q_prev;
  Vector p_prev;
  Vector v_slot;
  Vector lambda;
};

struct ImpactResolution {
  State pre;    ///< state k with its v slot replaced by q~
  ImpactEvent event;
  State next;   ///< state k+1
  StepStats pre_stats;
  StepStats next_stats;
};

namespace detail {

inline void trace(const IntegratorOptions& opts, TraceLevel level, const std::string& msg) {
  if (opts.trace) opts.trace(level, msg);
}

inline Error newton_failure(const std::string& phase, const NewtonResult& r) {
  ErrorContext ctx;
  ctx.residual = r.residual_norm;
  ctx.phase = phase;
  return Error(ErrorKind::NewtonFailure,
               phase + " did not converge (residual " + std::to_string(r.residual_norm) +
                   " after " + std::to_string(r.iterations) + " iterations)",
               std::move(ctx));
}

struct ConstrainedSolve {
  Vector v;
  Vector lambda;
  NewtonResult newton;
};

// Solves D1 L_d(q, v, h) + p = omega(q)^T lambda, omega_d+(q, v) = 0 for (v, lambda).
inline ConstrainedSolve solve_constrained(const DiscreteLagrangian& ld, const Vector& q,
                                          const Vector& p, double h, const Vector& v_guess,
                                          const Vector& lambda_guess,
                                          const IntegratorOptions& opts,
                                          const std::string& phase) {
  const MechanicalModel& model = ld.model();
  const int n = model.dim();
  const int m = model.constraint_count();
  const Matrix w = model.omega(q);

  auto residual = [&](const Vector& x) {
    const Vector v = x.head(n);
    const Vector lam = x.tail(m);
    Vector r(n + m);
    r.head(n) = ld.d1(q, v, h) + p - w.transpose() * lam;
    r.tail(m) = w * model.retract_inverse(q, v, h);
    return r;
  };

  Vector x0(n + m);
  x0.head(n) = v_guess;
  x0.tail(m) = lambda_guess.size() == m ? lambda_guess : Vector(Vector::Zero(m));
  NewtonResult r = newton_solve(residual, x0, opts.newton);
  trace(opts, TraceLevel::Debug,
        phase + ": " + std::to_string(r.iterations) + " iterations, residual " +
            std::to_string(r.residual_norm));
  if (!r.converged) throw newton_failure(phase, r);
  return {r.x.head(n), r.x.tail(m), std::move(r)};
}

inline double omega_residual(const MechanicalModel& model, const Vector& q, const Vector& v,
                             double h) {
  return model.constraint_count() == 0 ? 0.0 : inf_norm(omega_dplus(model, q, v, h));
}

}  // namespace detail

/// Smooth forward step from `state` (state.v becomes q_{k+1}).
[[nodiscard]] inline State step_plus(const DiscreteLagrangian& ld, const State& state, double h,
                                     const IntegratorOptions& opts = {},
                                     StepStats* stats = nullptr) {
  State next;
  next.k = state.k + 1;
  next.t = state.t + h;
  next.step = h;
  next.p = ld.d2(state.q, state.v, h);
  next.q = state.v;
  // Linear extrapolation of the discrete velocity.
  const Vector guess = 2.0 * state.v - state.q;
  auto sol = detail::solve_constrained(ld, next.q, next.p, h, guess, state.lambda, opts,
                                       "step " + std::to_string(next.k));
  next.v = std::move(sol.v);
  next.lambda = std::move(sol.lambda);
  if (stats) {
    *stats = StepStats{next.k, sol.newton.iterations, sol.newton.residual_norm,
                       detail::omega_residual(ld.model(), next.q, next.v, h), false};
  }
  return next;
}

/// Backward step: recovers (q_k, p_k) from (q_{k+1}, p_{k+1}).
[[nodiscard]] inline BackwardStep step_minus(const DiscreteLagrangian& ld, const Vector& q_next,
                                             const Vector& p_next, double h,
                                             const IntegratorOptions& opts = {},
                                             const Vector& v_guess = Vector()) {
  const MechanicalModel& model = ld.model();
  model.check_dim(q_next, "q_next");
  model.check_dim(p_next, "p_next");
  const int n = model.dim();
  const int m = model.constraint_count();
  const Matrix w = model.omega(q_next);

  auto residual = [&](const Vector& x) {
    const Vector v = x.head(n);
    const Vector lam = x.tail(m);
    Vector r(n + m);
    r.head(n) = p_next - ld.d2(v, q_next, h) - w.transpose() * lam;
    r.tail(m) = omega_dminus(model, v, q_next, h);
    return r;
  };
  Vector x0 = Vector::Zero(n + m);
  x0.head(n) = v_guess.size() == n ? v_guess : q_next;
  const NewtonResult r = newton_solve(residual, x0, opts.newton);
  if (!r.converged) throw detail::newton_failure("backward step", r);

  BackwardStep out;
  out.v_slot = r.x.head(n);
  out.lambda = r.x.tail(m);
  out.q_prev = out.v_slot;
  out.p_prev = -ld.d1(out.v_slot, q_next, h);
  return out;
}

/**
 * Replaces the rejected step k -> k+1 by an elastic impact at t_k + alpha h.
 *
 * Phase A finds (alpha, v_k, lambda) so that the shortened step lands on the
 * boundary, q~ = v_k. Phase B finds the post-impact point v~ (and lambda~)
 * matching the discrete energy D3 L_d across the impact and the boundary
 * momentum p~ taken from D2 L_d(q_k, v_k, alpha h) (see MomentumTransfer).
 * Phase C sets
 * p_{k+1} = D2 L_d(q~, v~, (1-alpha)h), q_{k+1} = v~, and phase D is the
 * usual constrained solve for v_{k+1}.
 */
[[nodiscard]] inline ImpactResolution resolve_impact(const DiscreteLagrangian& ld,
                                                     const State& state, double h,
                                                     const Vector& rejected_q,
                                                     const IntegratorOptions& opts = {}) {
  const MechanicalModel& model = ld.model();
  const int n = model.dim();
  const int m = model.constraint_count();
  const Vector& qk = state.q;
  const Vector& pk = state.p;

  const double c_k = model.boundary_gap(qk);
  const double c_rej = model.boundary_gap(rejected_q);
  if (!(c_k > 0.0) || !(c_rej < 0.0)) {
    throw Error(ErrorKind::InvalidInitialState,
                "impact resolution needs c(q_k) > 0 and c(rejected) < 0");
  }

  // ---- Phase A: alpha, v_k, lambda_A.
  const Matrix w_k = model.omega(qk);
  auto phase_a = [&](const Vector& x) {
    const double s = x[0] * h;
    const Vector v = x.segment(1, n);
    const Vector lam = x.tail(m);
    Vector r(n + m + 1);
    r.head(n) = ld.d1(qk, v, s) + pk - w_k.transpose() * lam;
    r.segment(n, m) = w_k * model.retract_inverse(qk, v, s);
    r[n + m] = model.boundary_gap(v);
    return r;
  };
  const double alpha0 = c_k / (c_k - c_rej);
  Vector xa(n + m + 1);
  xa[0] = alpha0;
  xa.segment(1, n) = qk + alpha0 * (state.v - qk);
  xa.tail(m) = state.lambda.size() == m ? state.lambda : Vector(Vector::Zero(m));
  const NewtonResult ra = newton_solve(phase_a, xa, opts.newton);
  if (!ra.converged) throw detail::newton_failure("impact phase A", ra);

  const double alpha = ra.x[0];
  if (!(alpha > opts.alpha_eps && alpha < 1.0 - opts.alpha_eps)) {
    ErrorContext ctx;
    ctx.phase = "impact phase A";
    throw Error(ErrorKind::AlphaOutOfRange, "alpha = " + std::to_string(alpha), ctx);
  }
  const double s_pre = alpha * h;
  const double s_post = (1.0 - alpha) * h;
  const Vector q_tilde = ra.x.segment(1, n);
  const Vector lambda_a = ra.x.tail(m);

  // ---- Phase B: v~, lambda_B.
  const BoundaryFrame frame = boundary_frame(model, q_tilde);
  const Vector d2_pre = ld.d2(qk, q_tilde, s_pre);
  Vector p_tilde;
  if (opts.transfer == MomentumTransfer::Pullback) {
    p_tilde = pullback_cotangent(frame, d2_pre);
  } else {
    const Matrix ppt = frame.P * frame.P.transpose();
    p_tilde = ppt.ldlt().solve(frame.P * d2_pre);
  }
  const double d3_pre = ld.d3(qk, q_tilde, s_pre);
  const Matrix w_tilde = model.omega(q_tilde);

  auto phase_b = [&](const Vector& x) {
    const Vector v = x.head(n);
    const Vector lam = x.tail(m);
    Vector r(n + m);
    r[0] = d3_pre - ld.d3(q_tilde, v, s_post);
    r.segment(1, n - 1) =
        frame.E.transpose() * (ld.d1(q_tilde, v, s_post) - w_tilde.transpose() * lam) + p_tilde;
    r.tail(m) = w_tilde * model.retract_inverse(q_tilde, v, s_post);
    return r;
  };

  // Start from the Euclidean reflection of the pre-impact discrete velocity.
  // Velocity constraints can pull Newton from there onto the penetrating
  // root, so full reversal and an inward-biased reflection are tried next.
  const Vector w_pre = model.retract_inverse(qk, q_tilde, s_pre);
  const Vector n_hat = frame.normal.normalized();
  const Vector w_refl = w_pre - 2.0 * n_hat.dot(w_pre) * n_hat;
  const std::vector<Vector> guesses{w_refl, Vector(-w_pre),
                                    Vector(w_refl + w_pre.norm() * n_hat)};

  NewtonResult rb;
  bool found = false;
  bool penetrating = false;
  for (const Vector& w_guess : guesses) {
    Vector xb(n + m);
    xb.head(n) = q_tilde + s_post * w_guess;
    xb.tail(m) = lambda_a;
    rb = newton_solve(phase_b, xb, opts.newton);
    if (!rb.converged) continue;
    const Vector v_t = rb.x.head(n);
    // Accept only the energy root that moves back into the interior.
    if (!(frame.normal.dot(v_t - q_tilde) > 0.0)) continue;
    if (model.boundary_gap(v_t) < -opts.grazing_tol) {
      penetrating = true;
      continue;
    }
    found = true;
    break;
  }
  if (!found) {
    if (!rb.converged) throw detail::newton_failure("impact phase B", rb);
    ErrorContext ctx;
    ctx.phase = "impact phase B";
    ctx.residual = rb.residual_norm;
    if (penetrating) {
      throw Error(ErrorKind::PersistentPenetration,
                  "post-impact point stays outside the admissible set", ctx);
    }
    throw Error(ErrorKind::RootSelectionAmbiguous,
                "energy root does not re-enter the admissible set", ctx);
  }
  const Vector v_tilde = rb.x.head(n);
  const Vector lambda_b = rb.x.tail(m);

  // ---- Phase C and D.
  State next;
  next.k = state.k + 1;
  next.t = state.t + h;
  next.step = h;
  next.q = v_tilde;
  next.p = ld.d2(q_tilde, v_tilde, s_post);
  const Vector guess = v_tilde + h * model.retract_inverse(q_tilde, v_tilde, s_post);
  auto sol = detail::solve_constrained(ld, next.q, next.p, h, guess, lambda_b, opts,
                                       "impact phase D");
  next.v = std::move(sol.v);
  next.lambda = std::move(sol.lambda);

  ImpactResolution out;
  out.pre = state;
  out.pre.v = q_tilde;
  out.pre.lambda = lambda_a;
  out.pre.step = s_pre;
  out.next = std::move(next);

  ImpactEvent& ev = out.event;
  ev.k = state.k;
  ev.alpha = alpha;
  ev.t_impact = state.t + s_pre;
  ev.q_tilde = q_tilde;
  ev.v_tilde = v_tilde;
  ev.p_tilde = p_tilde;
  ev.lambda_A = lambda_a;
  ev.lambda_B = lambda_b;
  ev.compat_residual = inf_norm(push_cotangent(frame, p_tilde) - d2_pre);
  ev.energy_jump = std::abs(d3_pre - ld.d3(q_tilde, v_tilde, s_post));
  ev.constraint_residual = detail::omega_residual(model, q_tilde, v_tilde, s_post);

  out.pre_stats = StepStats{state.k, ra.iterations, ra.residual_norm,
                            detail::omega_residual(model, qk, q_tilde, s_pre), true};
  out.next_stats = StepStats{out.next.k, rb.iterations + sol.newton.iterations,
                             sol.newton.residual_norm,
                             detail::omega_residual(model, out.next.q, out.next.v, h), true};
  detail::trace(opts, TraceLevel::Info,
                "impact at step " + std::to_string(state.k) + ", t = " +
                    std::to_string(ev.t_impact) + ", alpha = " + std::to_string(alpha));
  return out;
}

/// Integrates from the continuous initial condition (q0, v0) over [t0, t_final]
/// with N = round((t_final - t0)/h) steps of size h.
[[nodiscard]] inline Trajectory simulate(const DiscreteLagrangian& ld, const Vector& q0_cont,
                                         const Vector& v0_cont, double t0, double t_final,
                                         double h, const IntegratorOptions& opts = {}) {
  if (!(h > 0.0) || !(t_final > t0)) {
    throw Error(ErrorKind::InvalidInitialState, "need h > 0 and t_final > t0");
  }
  const long steps = std::lround((t_final - t0) / h);
  if (steps < 1) throw Error(ErrorKind::InvalidInitialState, "fewer than one step requested");
  opts.newton.validate();

  const MechanicalModel& model = ld.model();
  const DiscreteInitialState init = initial_discretize(ld, q0_cont, v0_cont, h);

  Trajectory traj;
  traj.h = h;
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  traj.solver_stats.reserve(static_cast<std::size_t>(steps) + 1);

  State s0;
  s0.k = 0;
  s0.t = t0;
  s0.q = init.q;
  s0.v = init.v;
  s0.p = init.p;
  s0.lambda = Vector::Zero(model.constraint_count());
  s0.step = h;
  traj.states.push_back(s0);
  traj.solver_stats.push_back(
      StepStats{0, 0, 0.0, detail::omega_residual(model, s0.q, s0.v, h), false});

  // A step that lands outside S right after an impact gets one more impact
  // solve; a third consecutive penetration aborts the run.
  int consecutive_impacts = 0;
  for (long k = 0; k < steps; ++k) {
    const State& cur = traj.states.back();
    try {
      if (model.boundary_gap(cur.v) < -opts.grazing_tol) {
        if (consecutive_impacts >= 2) {
          throw Error(ErrorKind::PersistentPenetration,
                      "trajectory still outside the admissible set after a repeated impact solve");
        }
        ++consecutive_impacts;
        ImpactResolution res = resolve_impact(ld, cur, h, cur.v, opts);
        res.next.t = t0 + static_cast<double>(k + 1) * h;
        traj.states.back() = std::move(res.pre);
        traj.solver_stats.back() = res.pre_stats;
        traj.impacts.push_back(std::move(res.event));
        traj.states.push_back(std::move(res.next));
        traj.solver_stats.push_back(res.next_stats);
      } else {
        consecutive_impacts = 0;
        StepStats stats;
        State next = step_plus(ld, cur, h, opts, &stats);
        next.t = t0 + static_cast<double>(k + 1) * h;
        traj.states.push_back(std::move(next));
        traj.solver_stats.push_back(stats);
      }
    } catch (const Error& e) {
      throw e.at(k, t0 + static_cast<double>(k) * h);
    }
  }
  return traj;
}

}  // namespace nhvi
