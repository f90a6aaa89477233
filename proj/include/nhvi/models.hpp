#pragma once

// The three systems shipped with the library: a particle bouncing on a floor,
// a planar rigid body (star or ellipse) bouncing on a floor, and a spherical
// pendulum with a velocity constraint swinging inside a cylinder.

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <variant>

#include "nhvi/errors.hpp"
#include "nhvi/geometry.hpp"

namespace nhvi {

namespace detail {
inline void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorKind::SchemaError, std::string(what) + " must be positive and finite");
  }
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Particle, coordinates (x, y), floor y = 0.

struct ParticleParams {
  double mass = 1.0;
  double gravity = 9.8;
  bool operator==(const ParticleParams&) const = default;
};

class ParticleModel final : public MechanicalModel {
 public:
  explicit ParticleModel(ParticleParams params) : p_(params) {
    detail::require_positive(p_.mass, "mass");
    // g = 0 is allowed for free-flight checks.
    if (!(p_.gravity >= 0.0)) throw Error(ErrorKind::SchemaError, "gravity must be >= 0");
  }

  std::string_view name() const override { return "particle"; }
  int dim() const override { return 2; }
  int constraint_count() const override { return 0; }
  std::vector<std::string> coordinate_names() const override { return {"x", "y"}; }
  std::map<std::string, double> params() const override {
    return {{"mass", p_.mass}, {"gravity", p_.gravity}};
  }
  const ParticleParams& particle_params() const { return p_; }

  double lagrangian(const Vector& q, const Vector& v) const override {
    return 0.5 * p_.mass * v.squaredNorm() - p_.mass * p_.gravity * q[1];
  }
  Vector dL_dq(const Vector&, const Vector&) const override {
    return vec({0.0, -p_.mass * p_.gravity});
  }
  Vector dL_dv(const Vector&, const Vector& v) const override { return p_.mass * v; }

  double boundary_gap(const Vector& q) const override { return q[1]; }
  Vector boundary_gap_grad(const Vector&) const override { return vec({0.0, 1.0}); }
  Matrix tangent_basis(const Vector&) const override {
    Matrix e(2, 1);
    e << 1.0, 0.0;
    return e;
  }
  Matrix projection(const Vector&) const override {
    Matrix p(1, 2);
    p << 1.0, 0.0;
    return p;
  }

 private:
  ParticleParams p_;
};

// ---------------------------------------------------------------------------
// Planar rigid body, coordinates (theta, x, y). The support function phi(theta)
// is the distance from the rotation axis to the lowest point of the body.

struct StarShape {
  double l = 1.0;  ///< half-length of each arm
  bool operator==(const StarShape&) const = default;
};
struct EllipseShape {
  double a = 1.0;
  double b = 0.5;
  bool operator==(const EllipseShape&) const = default;
};
using BodyShape = std::variant<StarShape, EllipseShape>;

struct Se2BodyParams {
  double mass = 1.0;
  double gravity = 9.8;
  std::optional<double> inertia;  ///< defaults to m(a^2+b^2)/4 for an ellipse
  BodyShape shape = EllipseShape{};
  bool operator==(const Se2BodyParams&) const = default;
};

class Se2BodyModel final : public MechanicalModel {
 public:
  explicit Se2BodyModel(Se2BodyParams params) : p_(std::move(params)) {
    detail::require_positive(p_.mass, "mass");
    detail::require_positive(p_.gravity, "gravity");
    if (const auto* e = std::get_if<EllipseShape>(&p_.shape)) {
      detail::require_positive(e->a, "ellipse a");
      detail::require_positive(e->b, "ellipse b");
      if (!p_.inertia) p_.inertia = p_.mass * (e->a * e->a + e->b * e->b) / 4.0;
    } else {
      detail::require_positive(std::get<StarShape>(p_.shape).l, "star l");
      if (!p_.inertia) throw Error(ErrorKind::SchemaError, "star body needs an explicit inertia");
    }
    detail::require_positive(*p_.inertia, "inertia");
  }

  std::string_view name() const override { return "se2_body"; }
  int dim() const override { return 3; }
  int constraint_count() const override { return 0; }
  std::vector<std::string> coordinate_names() const override { return {"theta", "x", "y"}; }
  std::map<std::string, double> params() const override {
    std::map<std::string, double> out{
        {"mass", p_.mass}, {"gravity", p_.gravity}, {"inertia", *p_.inertia}};
    if (const auto* e = std::get_if<EllipseShape>(&p_.shape)) {
      out["a"] = e->a;
      out["b"] = e->b;
    } else {
      out["l"] = std::get<StarShape>(p_.shape).l;
    }
    return out;
  }
  const Se2BodyParams& body_params() const { return p_; }
  double inertia() const { return *p_.inertia; }

  double support(double theta) const {
    const double s = std::sin(theta), c = std::cos(theta);
    if (const auto* e = std::get_if<EllipseShape>(&p_.shape)) {
      return std::sqrt(e->a * e->a * s * s + e->b * e->b * c * c);
    }
    return std::get<StarShape>(p_.shape).l * (std::abs(s) + std::abs(c));
  }

  /// d phi / d theta. Undefined at the star's corners, where this returns the
  /// average of the one-sided derivatives.
  double support_slope(double theta) const {
    const double s = std::sin(theta), c = std::cos(theta);
    if (const auto* e = std::get_if<EllipseShape>(&p_.shape)) {
      return (e->a * e->a - e->b * e->b) * s * c / support(theta);
    }
    return std::get<StarShape>(p_.shape).l * (sign(s) * c - sign(c) * s);
  }

  bool is_corner(double theta) const {
    if (!std::holds_alternative<StarShape>(p_.shape)) return false;
    return std::abs(std::sin(theta)) < 1e-12 || std::abs(std::cos(theta)) < 1e-12;
  }

  double lagrangian(const Vector& q, const Vector& v) const override {
    return 0.5 * p_.mass * (v[1] * v[1] + v[2] * v[2]) + 0.5 * inertia() * v[0] * v[0] -
           p_.mass * p_.gravity * q[2];
  }
  Vector dL_dq(const Vector&, const Vector&) const override {
    return vec({0.0, 0.0, -p_.mass * p_.gravity});
  }
  Vector dL_dv(const Vector&, const Vector& v) const override {
    return vec({inertia() * v[0], p_.mass * v[1], p_.mass * v[2]});
  }

  double boundary_gap(const Vector& q) const override { return q[2] - support(q[0]); }
  Vector boundary_gap_grad(const Vector& q) const override {
    return vec({-support_slope(q[0]), 0.0, 1.0});
  }

  // e1 = d/dx, e2 = d/dtheta + phi'(theta) d/dy
  Matrix tangent_basis(const Vector& q) const override {
    if (is_corner(q[0])) {
      throw Error(ErrorKind::DegenerateFrame, "star support function has a corner at theta");
    }
    Matrix e(3, 2);
    e << 0.0, 1.0,
         1.0, 0.0,
         0.0, support_slope(q[0]);
    return e;
  }
  // pi(v) = v_x e1 + v_theta e2
  Matrix projection(const Vector&) const override {
    Matrix p(2, 3);
    p << 0.0, 1.0, 0.0,
         1.0, 0.0, 0.0;
    return p;
  }

 private:
  static double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
  Se2BodyParams p_;
};

// ---------------------------------------------------------------------------
// Spherical pendulum, coordinates (theta, phi), with the velocity constraint
// v_phi = f(theta) v_theta and the cylinder wall l |sin(theta)| <= R.

/// f(theta) = offset + cos2_amplitude * cos^2(theta).
struct ConstraintGain {
  double offset = std::numbers::pi;
  double cos2_amplitude = 1.0;

  double operator()(double theta) const {
    const double c = std::cos(theta);
    return offset + cos2_amplitude * c * c;
  }
  bool operator==(const ConstraintGain&) const = default;
};

struct PendulumParams {
  double mass = 1.0;
  double gravity = 9.8;
  double length = 2.0;
  double radius = 1.5;
  ConstraintGain gain{};
  bool operator==(const PendulumParams&) const = default;
};

class PendulumModel final : public MechanicalModel {
 public:
  static constexpr double kPoleGuard = 1e-6;

  explicit PendulumModel(PendulumParams params) : p_(params) {
    detail::require_positive(p_.mass, "mass");
    detail::require_positive(p_.gravity, "gravity");
    detail::require_positive(p_.length, "length");
    detail::require_positive(p_.radius, "radius");
    if (!(p_.radius < p_.length)) {
      throw Error(ErrorKind::SchemaError, "cylinder radius must be smaller than the length");
    }
    if (!std::isfinite(p_.gain.offset) || !std::isfinite(p_.gain.cos2_amplitude)) {
      throw Error(ErrorKind::SchemaError, "constraint gain must be finite");
    }
  }

  std::string_view name() const override { return "pendulum"; }
  int dim() const override { return 2; }
  int constraint_count() const override { return 1; }
  std::vector<std::string> coordinate_names() const override { return {"theta", "phi"}; }
  std::map<std::string, double> params() const override {
    return {{"mass", p_.mass},     {"gravity", p_.gravity},
            {"length", p_.length}, {"radius", p_.radius},
            {"gain_offset", p_.gain.offset}, {"gain_cos2_amplitude", p_.gain.cos2_amplitude}};
  }
  const PendulumParams& pendulum_params() const { return p_; }
  double gain(double theta) const { return p_.gain(theta); }

  double lagrangian(const Vector& q, const Vector& v) const override {
    const double s = std::sin(q[0]);
    const double ml2 = p_.mass * p_.length * p_.length;
    return 0.5 * ml2 * (v[0] * v[0] + v[1] * v[1] * s * s) -
           p_.mass * p_.gravity * p_.length * std::cos(q[0]);
  }
  Vector dL_dq(const Vector& q, const Vector& v) const override {
    const double s = std::sin(q[0]), c = std::cos(q[0]);
    const double ml2 = p_.mass * p_.length * p_.length;
    return vec({ml2 * v[1] * v[1] * s * c + p_.mass * p_.gravity * p_.length * s, 0.0});
  }
  Vector dL_dv(const Vector& q, const Vector& v) const override {
    const double s = std::sin(q[0]);
    const double ml2 = p_.mass * p_.length * p_.length;
    return vec({ml2 * v[0], ml2 * s * s * v[1]});
  }

  // omega^1 = f(theta) dtheta - dphi
  Matrix omega(const Vector& q) const override {
    Matrix w(1, 2);
    w << p_.gain(q[0]), -1.0;
    return w;
  }

  // theta is integrated on the covering line, so theta in (pi, 2 pi) is the
  // far side of the sphere; the wall there sits at l |sin theta| = R.
  double boundary_gap(const Vector& q) const override {
    return p_.radius - p_.length * std::abs(std::sin(q[0]));
  }
  Vector boundary_gap_grad(const Vector& q) const override {
    const double side = std::sin(q[0]) < 0.0 ? -1.0 : 1.0;
    return vec({-side * p_.length * std::cos(q[0]), 0.0});
  }
  Matrix tangent_basis(const Vector&) const override {
    Matrix e(2, 1);
    e << 0.0, 1.0;
    return e;
  }
  Matrix projection(const Vector&) const override {
    Matrix p(1, 2);
    p << 0.0, 1.0;
    return p;
  }

  void check_state(const Vector& q) const override {
    if (std::abs(std::sin(q[0])) < kPoleGuard) {
      throw Error(ErrorKind::PoleSingularity, "polar angle is at a pole of the chart");
    }
  }

 private:
  PendulumParams p_;
};

[[nodiscard]] inline std::shared_ptr<const ParticleModel> make_particle(ParticleParams params = {}) {
  return std::make_shared<const ParticleModel>(params);
}

[[nodiscard]] inline std::shared_ptr<const Se2BodyModel> make_se2_body(Se2BodyParams params = {}) {
  return std::make_shared<const Se2BodyModel>(std::move(params));
}

[[nodiscard]] inline std::shared_ptr<const PendulumModel> make_pendulum(PendulumParams params = {}) {
  return std::make_shared<const PendulumModel>(params);
}

}  // namespace nhvi
