#pragma once

// The experiment set-ups behind the bundled configs, available without
// reading a file.

#include <numbers>
#include <stdexcept>
#include <string_view>

#include "nhvi/io/config.hpp"

namespace nhvi::io {

/// Ellipse dropped onto the floor: a = 1, b = 0.5, I = m(a^2 + b^2)/4.
[[nodiscard]] inline SimConfig ellipse_preset() {
  SimConfig c;
  Se2BodyParams p;
  p.mass = 1.0;
  p.gravity = 9.8;
  p.shape = EllipseShape{1.0, 0.5};
  p.inertia = 0.3125;
  c.model = p;
  c.rule = Rule::Midpoint;
  c.q0 = {std::numbers::pi / 2.0, 0.0, 3.5};
  c.v0 = {-3.0, 2.0, 0.0};
  c.t0 = 0.0;
  c.t_final = 2.0;
  c.h = 0.01;
  c.outputs.plots = {PlotKind::Energy, PlotKind::Coordinates, PlotKind::PlaneTrajectory};
  return c;
}

/// Spherical pendulum with v_phi = (pi + cos^2 theta) v_theta inside a
/// cylinder of radius 1.5.
[[nodiscard]] inline SimConfig pendulum_preset() {
  constexpr double pi = std::numbers::pi;
  SimConfig c;
  c.model = PendulumParams{1.0, 9.8, 2.0, 1.5, ConstraintGain{pi, 1.0}};
  c.rule = Rule::RetractionLeft;
  c.q0 = {0.75 * pi, 0.0};
  c.v0 = {0.25 * pi, 0.25 * (pi + 0.5) * pi};
  c.t0 = 0.0;
  c.t_final = 5.0;
  c.h = 1e-3;
  c.outputs.plots = {PlotKind::Energy, PlotKind::Coordinates, PlotKind::PlaneTrajectory};
  return c;
}

/// Point mass launched sideways from y = 1.
[[nodiscard]] inline SimConfig particle_preset() {
  SimConfig c;
  c.model = ParticleParams{1.0, 9.8};
  c.rule = Rule::Midpoint;
  c.q0 = {0.0, 1.0};
  c.v0 = {0.5, 0.0};
  c.t0 = 0.0;
  c.t_final = 2.0;
  c.h = 1e-3;
  c.outputs.plots = {PlotKind::Energy, PlotKind::PlaneTrajectory};
  return c;
}

[[nodiscard]] inline SimConfig preset(std::string_view name) {
  if (name == "ellipse") return ellipse_preset();
  if (name == "pendulum") return pendulum_preset();
  if (name == "particle") return particle_preset();
  throw Error(ErrorKind::SchemaError,
              "unknown demo '" + std::string(name) + "' (expected particle, ellipse or pendulum)");
}

}  // namespace nhvi::io
