#pragma once

#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nhvi/errors.hpp"
#include "nhvi/numerics.hpp"

namespace nhvi {

/// Largest |c(q)| at which a point is treated as lying on the boundary.
inline constexpr double kFrameTolerance = 1e-8;
/// Largest deviation of P*E from the identity accepted for a boundary frame.
inline constexpr double kFrameIdentityTolerance = 1e-10;

/**
 * A mechanical system on a vector-space configuration manifold Q = R^n.
 *
 * Besides the Lagrangian it carries the constraint one-forms (rows of
 * omega(q)), the admissible set S = {c(q) >= 0} and, for points of the
 * boundary c = 0, a tangent basis E (columns span T dS) together with a
 * chosen left inverse P of E. Cotangent vectors of the boundary are stored
 * as coefficients against the dual basis of E's columns, so the pullback
 * of a covector is E^T p and the push-forward of a boundary covector is P^T p.
 *
 * Instances are immutable once constructed.
 */
class MechanicalModel {
 public:
  virtual ~MechanicalModel() = default;

  [[nodiscard]] virtual std::string_view name() const = 0;
  [[nodiscard]] virtual int dim() const = 0;
  [[nodiscard]] virtual int constraint_count() const = 0;
  [[nodiscard]] virtual std::vector<std::string> coordinate_names() const = 0;
  [[nodiscard]] virtual std::map<std::string, double> params() const = 0;

  [[nodiscard]] virtual double lagrangian(const Vector& q, const Vector& v) const = 0;

  /// dL/dq. The default is a central difference of lagrangian().
  [[nodiscard]] virtual Vector dL_dq(const Vector& q, const Vector& v) const {
    return gradient([&](const Vector& x) { return lagrangian(x, v); }, q);
  }

  /// dL/dv. The default is a central difference of lagrangian().
  [[nodiscard]] virtual Vector dL_dv(const Vector& q, const Vector& v) const {
    return gradient([&](const Vector& x) { return lagrangian(q, x); }, v);
  }

  /// Constraint one-forms as rows (m x n). Unconstrained models return 0 x n.
  [[nodiscard]] virtual Matrix omega(const Vector& /*q*/) const { return Matrix(0, dim()); }

  /// Gap function: positive inside S, zero on the boundary, negative outside.
  [[nodiscard]] virtual double boundary_gap(const Vector& q) const = 0;

  [[nodiscard]] virtual Vector boundary_gap_grad(const Vector& q) const {
    return gradient([&](const Vector& x) { return boundary_gap(x); }, q);
  }

  /// n x (n-1) basis of the boundary tangent space at a boundary point.
  [[nodiscard]] virtual Matrix tangent_basis(const Vector& q) const = 0;
  /// (n-1) x n linear projection onto that tangent space (left inverse of E).
  [[nodiscard]] virtual Matrix projection(const Vector& q) const = 0;

  /// Inverse retraction scaled by 1/h. The discrete Lagrangians in this
  /// library assume this affine form when differentiating.
  [[nodiscard]] virtual Vector retract_inverse(const Vector& q, const Vector& v,
                                               double h) const {
    return (v - q) / h;
  }

  /// Throws if `q` is not a state the model can be started from.
  virtual void check_state(const Vector& /*q*/) const {}

  void check_dim(const Vector& x, std::string_view what) const {
    if (x.size() != dim()) {
      throw Error(ErrorKind::DimensionMismatch,
                  std::string(what) + " has length " + std::to_string(x.size()) +
                      ", model '" + std::string(name()) + "' expects " + std::to_string(dim()));
    }
  }

 private:
  template <class Fn>
  static Vector gradient(Fn&& fn, const Vector& x) {
    Vector g(x.size());
    Vector xp = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double step = 1e-6 * std::max(1.0, std::abs(x[j]));
      xp[j] = x[j] + step;
      const double fp = fn(xp);
      xp[j] = x[j] - step;
      const double fm = fn(xp);
      xp[j] = x[j];
      g[j] = (fp - fm) / (2.0 * step);
    }
    return g;
  }
};

/// Tangent data of the boundary at one point.
struct BoundaryFrame {
  Vector point;   ///< q~ on the boundary
  Matrix E;       ///< n x (n-1), columns span the tangent space
  Matrix P;       ///< (n-1) x n, P * E = I
  Vector normal;  ///< grad c at q~

  [[nodiscard]] Eigen::Index dim() const { return E.rows(); }
};

/// Pullback of a covector to the boundary, E^T p.
[[nodiscard]] inline Vector pullback_cotangent(const BoundaryFrame& frame, const Vector& p) {
  if (p.size() != frame.E.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "pullback_cotangent: covector length " +
                                                  std::to_string(p.size()) + " != " +
                                                  std::to_string(frame.E.rows()));
  }
  return frame.E.transpose() * p;
}

/// Push-forward of a boundary covector through the chosen projection, P^T p~.
[[nodiscard]] inline Vector push_cotangent(const BoundaryFrame& frame, const Vector& p_tilde) {
  if (p_tilde.size() != frame.P.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "push_cotangent: boundary covector length " +
                                                  std::to_string(p_tilde.size()) + " != " +
                                                  std::to_string(frame.P.rows()));
  }
  return frame.P.transpose() * p_tilde;
}

[[nodiscard]] inline BoundaryFrame boundary_frame(const MechanicalModel& model,
                                                  const Vector& q_tilde) {
  model.check_dim(q_tilde, "boundary point");
  const double gap = model.boundary_gap(q_tilde);
  if (!(std::abs(gap) <= kFrameTolerance)) {
    throw Error(ErrorKind::NotOnBoundary,
                "gap " + std::to_string(gap) + " exceeds frame tolerance");
  }
  BoundaryFrame frame{q_tilde, model.tangent_basis(q_tilde), model.projection(q_tilde),
                      model.boundary_gap_grad(q_tilde)};
  const int n = model.dim();
  if (frame.E.rows() != n || frame.E.cols() != n - 1 || frame.P.rows() != n - 1 ||
      frame.P.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "boundary frame has wrong shape");
  }
  const Matrix defect = frame.P * frame.E - Matrix::Identity(n - 1, n - 1);
  if (!frame.E.allFinite() || !frame.P.allFinite() ||
      (defect.size() > 0 && defect.cwiseAbs().maxCoeff() > kFrameIdentityTolerance)) {
    throw Error(ErrorKind::DegenerateFrame, "P * E differs from the identity");
  }
  return frame;
}

}  // namespace nhvi
