#pragma once

// Dense linear algebra aliases, central-difference Jacobians and the damped
// Newton solver used by every implicit solve in the integrator.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "nhvi/errors.hpp"

namespace nhvi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

[[nodiscard]] inline double inf_norm(const Vector& x) {
  return x.size() == 0 ? 0.0 : x.lpNorm<Eigen::Infinity>();
}

[[nodiscard]] inline bool all_finite(const Vector& x) { return x.allFinite(); }

/// Builds a vector from a brace list, e.g. `vec({0.0, 1.0})`.
[[nodiscard]] inline Vector vec(std::initializer_list<double> values) {
  Vector out(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) out[i++] = v;
  return out;
}

struct NewtonOptions {
  double tol = 1e-10;      ///< bound on the residual infinity norm
  int max_iter = 50;
  int max_backtracks = 30;
  double fd_eps = 1e-7;    ///< relative central-difference step

  bool operator==(const NewtonOptions&) const = default;

  void validate() const {
    if (!(tol > 0.0) || max_iter < 1 || max_backtracks < 1 || !(fd_eps > 0.0)) {
      throw Error(ErrorKind::SchemaError,
                  "NewtonOptions requires tol > 0, max_iter >= 1, max_backtracks >= 1, fd_eps > 0");
    }
  }
};

struct NewtonResult {
  Vector x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Central-difference Jacobian of `f` at `x`. The step for coordinate j is
/// eps * max(1, |x_j|).
template <class F>
[[nodiscard]] Matrix fd_jacobian(F&& f, const Vector& x, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::SchemaError, "fd_jacobian needs eps > 0");
  const Eigen::Index n = x.size();
  Matrix jac;
  Vector xp = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double step = eps * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + step;
    const Vector fp = f(std::as_const(xp));
    xp[j] = x[j] - step;
    const Vector fm = f(std::as_const(xp));
    xp[j] = x[j];
    if (!fp.allFinite() || !fm.allFinite()) {
      throw Error(ErrorKind::EvaluationFailure,
                  "non-finite residual while differencing coordinate " + std::to_string(j));
    }
    if (j == 0) jac.resize(fp.size(), n);
    jac.col(j) = (fp - fm) / (2.0 * step);
  }
  return jac;
}

namespace detail {

// Solves jac * dx = rhs. Falls back to a Tikhonov-regularised normal-equation
// solve with shift 1e-12 * ||J||_inf when the plain factorisation is rank
// deficient.
inline Vector newton_direction(const Matrix& jac, const Vector& rhs) {
  if (jac.rows() == jac.cols()) {
    Eigen::ColPivHouseholderQR<Matrix> qr(jac);
    if (qr.rank() == jac.cols()) {
      Vector dx = qr.solve(rhs);
      if (dx.allFinite()) return dx;
    }
  }
  const double jnorm = jac.cwiseAbs().rowwise().sum().maxCoeff();
  const double shift = 1e-12 * jnorm;
  if (!(shift > 0.0) || !std::isfinite(shift)) {
    throw Error(ErrorKind::SingularJacobian, "Jacobian is zero or non-finite");
  }
  const Matrix normal =
      jac.transpose() * jac + (shift * jnorm) * Matrix::Identity(jac.cols(), jac.cols());
  Eigen::LDLT<Matrix> ldlt(normal);
  Vector dx = ldlt.solve(jac.transpose() * rhs);
  if (ldlt.info() != Eigen::Success || !dx.allFinite()) {
    throw Error(ErrorKind::SingularJacobian, "regularised Newton step failed");
  }
  return dx;
}

}  // namespace detail

/// Damped Newton iteration with step-halving line search. `jacobian` maps an
/// iterate to dF/dx; pass nullptr-like empty std::function to use
/// central differences.
template <class F>
[[nodiscard]] NewtonResult newton_solve(F&& f, Vector x0, const NewtonOptions& opts,
                                        const std::function<Matrix(const Vector&)>& jacobian = {}) {
  opts.validate();
  NewtonResult res;
  res.x = std::move(x0);
  Vector fx = f(std::as_const(res.x));
  if (!fx.allFinite()) {
    throw Error(ErrorKind::EvaluationFailure, "non-finite residual at the initial guess");
  }
  res.residual_norm = inf_norm(fx);

  while (res.residual_norm > opts.tol) {
    if (res.iterations >= opts.max_iter) return res;
    const Matrix jac = jacobian ? jacobian(res.x) : fd_jacobian(f, res.x, opts.fd_eps);
    const Vector dx = detail::newton_direction(jac, -fx);

    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt, lambda *= 0.5) {
      Vector trial = res.x + lambda * dx;
      Vector ft = f(std::as_const(trial));
      if (!ft.allFinite()) continue;
      const double norm = inf_norm(ft);
      if (norm < res.residual_norm) {
        res.x = std::move(trial);
        fx = std::move(ft);
        res.residual_norm = norm;
        accepted = true;
        break;
      }
    }
    ++res.iterations;
    // No descent along the Newton direction: the iterate is as good as this
    // method gets (usually the round-off floor).
    if (!accepted) return res;
  }
  res.converged = true;
  return res;
}

}  // namespace nhvi
