#pragma once

// CSV and JSON artifacts of a run. Numbers are written with 17 significant
// digits so every double survives a round trip through the file.

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include "nhvi/diagnostics.hpp"
#include "nhvi/errors.hpp"
#include "nhvi/integrator.hpp"
#include "nhvi/io/config.hpp"

namespace nhvi::io {

namespace detail {

inline void put(std::string& row, double x) {
  row += ',';
  fmt::format_to(std::back_inserter(row), "{:.17g}", x);
}

inline void put(std::string& row, const Vector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) put(row, x[i]);
}

inline void header(std::string& row, const char* prefix, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) fmt::format_to(std::back_inserter(row), ",{}{}", prefix, i);
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::EvaluationFailure, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace detail

/// One row per state: k, t, q*, v*, p*, lambda*, E, c, max_omega_residual.
/// Angles stay on the covering line, exactly as integrated.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                 const DiscreteLagrangian& ld) {
  const MechanicalModel& model = ld.model();
  const Eigen::Index n = model.dim();
  const Eigen::Index m = model.constraint_count();
  std::string row = "k,t";
  detail::header(row, "q", n);
  detail::header(row, "v", n);
  detail::header(row, "p", n);
  detail::header(row, "lambda", m);
  row += ",E,c,max_omega_residual\n";
  out << row;
  for (const State& s : traj.states) {
    row = fmt::format("{}", s.k);
    detail::put(row, s.t);
    detail::put(row, s.q);
    detail::put(row, s.v);
    detail::put(row, s.p);
    detail::put(row, s.lambda);
    detail::put(row, discrete_energy(ld, s.q, s.v, s.step));
    detail::put(row, model.boundary_gap(s.q));
    detail::put(row, nhvi::detail::omega_residual(model, s.q, s.v, s.step));
    row += '\n';
    out << row;
  }
}

inline void write_impacts_csv(std::ostream& out, const Trajectory& traj,
                              const MechanicalModel& model) {
  const Eigen::Index n = model.dim();
  std::string row = "k,alpha,t_impact";
  detail::header(row, "q_tilde", n);
  detail::header(row, "v_tilde", n);
  detail::header(row, "p_tilde", n - 1);
  row += ",compat_residual,energy_jump\n";
  out << row;
  for (const ImpactEvent& ev : traj.impacts) {
    row = fmt::format("{}", ev.k);
    detail::put(row, ev.alpha);
    detail::put(row, ev.t_impact);
    detail::put(row, ev.q_tilde);
    detail::put(row, ev.v_tilde);
    detail::put(row, ev.p_tilde);
    detail::put(row, ev.compat_residual);
    detail::put(row, ev.energy_jump);
    row += '\n';
    out << row;
  }
}

[[nodiscard]] inline json to_json(const RunReport& r) {
  return {
      {"impact_count", r.impact_count},
      {"impact_times", r.impact_times},
      {"energy_initial", r.energy_initial},
      {"energy_final", r.energy_final},
      {"energy_drift_rel", r.energy_drift_rel},
      {"max_energy_jump", r.max_energy_jump},
      {"max_constraint_residual", r.max_constraint_residual},
      {"max_momentum_residual", r.max_momentum_residual},
      {"min_boundary_gap", r.min_boundary_gap},
      {"newton_iter_stats", {{"mean", r.newton_iter_stats.mean}, {"max", r.newton_iter_stats.max}}},
      {"steps", r.steps},
  };
}

[[nodiscard]] inline json summary_json(const SimConfig& config, const RunReport& report,
                                       double wall_seconds) {
  json j = to_json(report);
  j["config"] = serialize(config);
  j["wall_seconds"] = wall_seconds;
  return j;
}

[[nodiscard]] inline json error_json(const Error& e) {
  json j = {{"error", std::string(to_string(e.kind()))}, {"message", e.detail()}};
  const ErrorContext& ctx = e.context();
  if (ctx.step) j["step"] = *ctx.step;
  if (ctx.time) j["time"] = *ctx.time;
  if (ctx.residual) j["residual"] = *ctx.residual;
  if (!ctx.phase.empty()) j["phase"] = ctx.phase;
  return j;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  auto out = detail::open_out(path);
  out << j.dump(2) << '\n';
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                                 const DiscreteLagrangian& ld) {
  auto out = detail::open_out(path);
  write_trajectory_csv(out, traj, ld);
}

inline void write_impacts_csv(const std::filesystem::path& path, const Trajectory& traj,
                              const MechanicalModel& model) {
  auto out = detail::open_out(path);
  write_impacts_csv(out, traj, model);
}

}  // namespace nhvi::io
