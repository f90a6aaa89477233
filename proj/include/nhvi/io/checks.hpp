#pragma once

// Static checks on a config that need no integration: the initial state,
// derivative consistency of the discrete Lagrangian, boundary frames and the
// rank of the constraint forms near the initial point.

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "nhvi/discretization.hpp"
#include "nhvi/geometry.hpp"
#include "nhvi/io/config.hpp"

namespace nhvi::io {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline double rel_err(double a, double b, double scale) {
  return std::abs(a - b) / std::max(1.0, scale);
}

// Moves q onto c = 0 along the gap gradient with a few Newton steps.
inline bool project_to_boundary(const MechanicalModel& model, Vector& q) {
  for (int it = 0; it < 50; ++it) {
    const double c = model.boundary_gap(q);
    if (std::abs(c) <= 1e-13) return true;
    const Vector g = model.boundary_gap_grad(q);
    const double gg = g.squaredNorm();
    if (!(gg > 0.0)) return false;
    q -= (c / gg) * g;
  }
  return std::abs(model.boundary_gap(q)) <= 1e-12;
}

}  // namespace detail

[[nodiscard]] inline std::vector<CheckResult> run_checks(const SimConfig& config,
                                                         unsigned seed = 7) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };

  try {
    validate(config);
    add("schema", true, "config invariants hold");
  } catch (const Error& e) {
    add("schema", false, e.what());
    return out;
  }
  const auto model = build_model(config.model);
  const DiscreteLagrangian ld(model, config.rule);
  const Vector q0 = to_vector(config.q0);
  const Vector v0 = to_vector(config.v0);

  try {
    const auto init = initial_discretize(ld, q0, v0, config.h);
    add("initial_state", true,
        fmt::format("c(q0) = {:.6g}, E0 = {:.10g}", model->boundary_gap(q0),
                    discrete_energy(ld, init.q, init.v, config.h)));
  } catch (const Error& e) {
    add("initial_state", false, e.what());
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int n = model->dim();

  // Analytic D1/D2/D3 against central differences of eval.
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Vector q = q0, v = q0;
    for (int i = 0; i < n; ++i) {
      q[i] += 0.2 * unit(rng);
      v[i] = q[i] + 0.05 * unit(rng);
    }
    const double h = config.h;
    const double scale = std::abs(ld.eval(q, v, h));
    const Vector d1 = ld.d1(q, v, h), d2 = ld.d2(q, v, h);
    for (int i = 0; i < n; ++i) {
      const double e = 1e-6 * std::max(1.0, std::abs(q[i]));
      Vector qp = q, qm = q, vp = v, vm = v;
      qp[i] += e, qm[i] -= e, vp[i] += e, vm[i] -= e;
      worst = std::max(worst, detail::rel_err(d1[i], (ld.eval(qp, v, h) - ld.eval(qm, v, h)) / (2 * e),
                                              scale / h));
      worst = std::max(worst, detail::rel_err(d2[i], (ld.eval(q, vp, h) - ld.eval(q, vm, h)) / (2 * e),
                                              scale / h));
    }
    const double eh = 1e-6 * h;
    worst = std::max(worst, detail::rel_err(ld.d3(q, v, h),
                                            (ld.eval(q, v, h + eh) - ld.eval(q, v, h - eh)) / (2 * eh),
                                            scale / h));
  }
  add("derivatives", worst <= 1e-6, fmt::format("max relative error {:.3g}", worst));

  // Boundary frames at points pushed onto c = 0 from around q0.
  double frame_defect = 0.0;
  int frames = 0;
  std::string frame_error;
  for (int trial = 0; trial < 20; ++trial) {
    Vector q = q0;
    for (int i = 0; i < n; ++i) q[i] += unit(rng);
    if (!detail::project_to_boundary(*model, q)) continue;
    try {
      const BoundaryFrame f = boundary_frame(*model, q);
      const Matrix d = f.P * f.E - Matrix::Identity(n - 1, n - 1);
      frame_defect = std::max(frame_defect, d.cwiseAbs().maxCoeff());
      ++frames;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateFrame) frame_error = e.what();
    }
  }
  add("boundary_frames", frame_error.empty() && frames > 0 && frame_defect <= 1e-12,
      frame_error.empty() ? fmt::format("{} frames, max |PE - I| {:.3g}", frames, frame_defect)
                          : frame_error);

  if (model->constraint_count() > 0) {
    const Matrix w = model->omega(q0);
    Eigen::FullPivLU<Matrix> lu(w);
    lu.setThreshold(1e-10);
    add("constraint_rank", lu.rank() == model->constraint_count(),
        fmt::format("rank {} of {}", lu.rank(), model->constraint_count()));
    // State 0 is not constraint-solved, so v0 has to lie in ker omega already.
    const double defect = inf_norm(w * v0);
    add("initial_constraint", defect <= 1e-10 * std::max(1.0, inf_norm(v0)),
        fmt::format("|omega(q0) v0| = {:.3g}", defect));
  }
  return out;
}

}  // namespace nhvi::io
