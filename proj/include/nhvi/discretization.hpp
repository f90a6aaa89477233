#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "nhvi/errors.hpp"
#include "nhvi/geometry.hpp"
#include "nhvi/numerics.hpp"

namespace nhvi {

enum class Rule {
  Midpoint,        ///< L_d = h L((q+v)/2, (v-q)/h)
  RetractionLeft,  ///< L_d = h L(q, (v-q)/h)
};

[[nodiscard]] inline std::string_view to_string(Rule rule) {
  return rule == Rule::Midpoint ? "midpoint" : "retraction-left";
}

[[nodiscard]] inline Rule rule_from_string(std::string_view s) {
  if (s == "midpoint") return Rule::Midpoint;
  if (s == "retraction-left") return Rule::RetractionLeft;
  throw Error(ErrorKind::SchemaError, "unknown discretization rule '" + std::string(s) + "'");
}

/**
 * Discrete Lagrangian L_d(q, v, h) built from a continuous one by a
 * quadrature rule. Partials are assembled with the chain rule from the
 * model's dL/dq and dL/dv; h stays a free argument so impact substeps can
 * use alpha*h and (1-alpha)*h.
 */
class DiscreteLagrangian {
 public:
  DiscreteLagrangian(std::shared_ptr<const MechanicalModel> model, Rule rule)
      : model_(std::move(model)), rule_(rule) {}

  [[nodiscard]] const MechanicalModel& model() const { return *model_; }
  [[nodiscard]] const std::shared_ptr<const MechanicalModel>& model_ptr() const { return model_; }
  [[nodiscard]] Rule rule() const { return rule_; }

  /// Point at which the continuous Lagrangian is sampled.
  [[nodiscard]] Vector base(const Vector& q, const Vector& v) const {
    return rule_ == Rule::Midpoint ? Vector(0.5 * (q + v)) : q;
  }

  [[nodiscard]] double eval(const Vector& q, const Vector& v, double h) const {
    return h * model_->lagrangian(base(q, v), model_->retract_inverse(q, v, h));
  }

  [[nodiscard]] Vector d1(const Vector& q, const Vector& v, double h) const {
    const Vector b = base(q, v);
    const Vector w = model_->retract_inverse(q, v, h);
    const double weight = rule_ == Rule::Midpoint ? 0.5 * h : h;
    return weight * model_->dL_dq(b, w) - model_->dL_dv(b, w);
  }

  [[nodiscard]] Vector d2(const Vector& q, const Vector& v, double h) const {
    const Vector b = base(q, v);
    const Vector w = model_->retract_inverse(q, v, h);
    if (rule_ == Rule::Midpoint) return 0.5 * h * model_->dL_dq(b, w) + model_->dL_dv(b, w);
    return model_->dL_dv(b, w);
  }

  [[nodiscard]] double d3(const Vector& q, const Vector& v, double h) const {
    const Vector b = base(q, v);
    const Vector w = model_->retract_inverse(q, v, h);
    return model_->lagrangian(b, w) - model_->dL_dv(b, w).dot(w);
  }

 private:
  std::shared_ptr<const MechanicalModel> model_;
  Rule rule_;
};

[[nodiscard]] inline DiscreteLagrangian make_discrete_lagrangian(
    std::shared_ptr<const MechanicalModel> model, Rule rule) {
  return DiscreteLagrangian(std::move(model), rule);
}

/// omega_q(R_q^{-1}(v)); vanishes iff (q, v) lies in the discrete constraint set.
[[nodiscard]] inline Vector omega_dplus(const MechanicalModel& model, const Vector& q,
                                        const Vector& v, double h) {
  return model.omega(q) * model.retract_inverse(q, v, h);
}

/// -omega_q(R_q^{-1}(v)), with the argument order of the backward equations.
[[nodiscard]] inline Vector omega_dminus(const MechanicalModel& model, const Vector& v,
                                         const Vector& q, double h) {
  return -(model.omega(q) * model.retract_inverse(q, v, h));
}

/// Discrete energy -D3 L_d. It equals dL/dv . w - L at the rule's base point.
[[nodiscard]] inline double discrete_energy(const DiscreteLagrangian& ld, const Vector& q,
                                            const Vector& v, double h) {
  return -ld.d3(q, v, h);
}

struct DiscreteInitialState {
  Vector q;
  Vector v;
  Vector p;
};

/// Converts a continuous initial condition (q(0), qdot(0)) to the first
/// discrete node. The midpoint rule centres the first step on q(0); the
/// retraction rule starts at q(0) and moves along R_{q(0)}(h qdot(0)).
[[nodiscard]] inline DiscreteInitialState initial_discretize(const DiscreteLagrangian& ld,
                                                             const Vector& q0_cont,
                                                             const Vector& v0_cont, double h) {
  const MechanicalModel& model = ld.model();
  model.check_dim(q0_cont, "q0");
  model.check_dim(v0_cont, "v0");
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidInitialState, "timestep must be positive");
  model.check_state(q0_cont);
  if (!(model.boundary_gap(q0_cont) > 0.0)) {
    throw Error(ErrorKind::InvalidInitialState, "q(0) is not in the interior of the admissible set");
  }

  DiscreteInitialState s;
  if (ld.rule() == Rule::Midpoint) {
    s.q = q0_cont - 0.5 * h * v0_cont;
    s.v = q0_cont + 0.5 * h * v0_cont;
  } else {
    s.q = q0_cont;
    s.v = q0_cont + h * v0_cont;
  }
  if (model.boundary_gap(s.q) < 0.0 || model.boundary_gap(s.v) < 0.0) {
    throw Error(ErrorKind::InvalidInitialState,
                "discretised initial pair leaves the admissible set");
  }
  s.p = ld.d2(s.q, s.v, h);
  return s;
}

}  // namespace nhvi
