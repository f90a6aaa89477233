#pragma once

#include <chrono>
#include <filesystem>
#include <optional>

#include "nhvi/diagnostics.hpp"
#include "nhvi/integrator.hpp"
#include "nhvi/io/config.hpp"
#include "nhvi/io/output.hpp"
#include "nhvi/io/svg.hpp"

namespace nhvi::io {

struct RunOutcome {
  Trajectory trajectory;
  RunReport report;
  double wall_seconds = 0.0;
};

/// Integrates `config` without touching the file system.
[[nodiscard]] inline RunOutcome simulate_config(const SimConfig& config, TraceSink trace = {}) {
  validate(config);
  const auto model = build_model(config.model);
  const DiscreteLagrangian ld(model, config.rule);
  IntegratorOptions opts = config.solver.integrator_options();
  opts.trace = std::move(trace);

  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  out.trajectory = simulate(ld, to_vector(config.q0), to_vector(config.v0), config.t0,
                            config.t_final, config.h, opts);
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.report = build_report(out.trajectory, ld, *model);
  return out;
}

/// Runs `config` and writes its artifacts into `out_dir`. On a solver error,
/// error.json is written and the error is rethrown.
inline RunOutcome run_to_directory(const SimConfig& config, const std::filesystem::path& out_dir,
                                   TraceSink trace = {}) {
  std::filesystem::create_directories(out_dir);
  std::filesystem::remove(out_dir / "error.json");
  RunOutcome out;
  try {
    out = simulate_config(config, std::move(trace));
  } catch (const Error& e) {
    write_json(out_dir / "error.json", error_json(e));
    throw;
  }
  const auto model = build_model(config.model);
  const DiscreteLagrangian ld(model, config.rule);
  // The impacts file is always written: an empty table is still an answer.
  write_impacts_csv(out_dir / "impacts.csv", out.trajectory, *model);
  if (config.outputs.csv) write_trajectory_csv(out_dir / "trajectory.csv", out.trajectory, ld);
  if (config.outputs.summary) {
    write_json(out_dir / "summary.json", summary_json(config, out.report, out.wall_seconds));
  }
  for (PlotKind kind : config.outputs.plots) {
    const auto file = out_dir / (std::string(to_string(kind)) + ".svg");
    switch (kind) {
      case PlotKind::Energy: energy_chart(out.trajectory, ld).save(file); break;
      case PlotKind::Coordinates: coordinates_chart(out.trajectory, *model).save(file); break;
      case PlotKind::PlaneTrajectory: plane_chart(out.trajectory, *model).save(file); break;
    }
  }
  return out;
}

}  // namespace nhvi::io
