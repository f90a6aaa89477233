#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "nhvi/numerics.hpp"
#include "test_support.hpp"

using nhvi::Matrix;
using nhvi::NewtonOptions;
using nhvi::Vector;
using nhvi::vec;

TEST(FdJacobian, IdentityMap) {
  const Matrix j = nhvi::fd_jacobian([](const Vector& x) { return x; }, vec({0.3, -7.0}), 1e-7);
  EXPECT_LE((j - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FdJacobian, ProductAndSum) {
  auto f = [](const Vector& x) { return vec({x[0] * x[1], x[0] + x[1]}); };
  const Matrix j = nhvi::fd_jacobian(f, vec({2.0, 3.0}), 1e-7);
  Matrix want(2, 2);
  want << 3, 2, 1, 1;
  EXPECT_LE((j - want).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(FdJacobian, ConstantMapGivesZero) {
  const Matrix j =
      nhvi::fd_jacobian([](const Vector&) { return vec({4.0, 5.0, 6.0}); }, vec({1.0, 2.0}), 1e-7);
  EXPECT_EQ(j.rows(), 3);
  EXPECT_LE(j.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FdJacobian, LinearMapIsRecovered) {
  testing_support::Sampler rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = Matrix::NullaryExpr(3, 4, [&] { return rng.uniform(-1e3, 1e3); });
    const Vector x0 = rng.vector(4, -10, 10);
    const Matrix j = nhvi::fd_jacobian([&](const Vector& x) -> Vector { return a * x; }, x0, 1e-7);
    EXPECT_LE((j - a).cwiseAbs().maxCoeff(), 1e-8 * 1e3) << "trial " << trial;
  }
}

TEST(FdJacobian, NonFiniteEvaluationNamesCoordinate) {
  auto f = [](const Vector& x) { return vec({x[1] > 1.0 ? std::log(-1.0) : x[0]}); };
  try {
    (void)nhvi::fd_jacobian(f, vec({0.0, 1.0}), 1e-3);
    FAIL() << "expected an error";
  } catch (const nhvi::Error& e) {
    EXPECT_EQ(e.kind(), nhvi::ErrorKind::EvaluationFailure);
    EXPECT_NE(e.detail().find("coordinate 1"), std::string::npos);
  }
}

TEST(FdJacobian, RejectsNonPositiveStep) {
  EXPECT_THROW((void)nhvi::fd_jacobian([](const Vector& x) { return x; }, vec({1.0}), 0.0),
               nhvi::Error);
}

TEST(NewtonSolve, SquareRoot) {
  NewtonOptions o;
  o.tol = 1e-12;
  const auto r = nhvi::newton_solve([](const Vector& x) { return vec({x[0] * x[0] - 4.0}); },
                                    vec({1.0}), o);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 2.0, 1e-12);
}

TEST(NewtonSolve, LinearShiftTakesOneIteration) {
  auto shift = [](const Vector& x) { return vec({x[0] - 3.25}); };
  const auto r = nhvi::newton_solve(shift, vec({-40.0}), NewtonOptions{},
                                    [](const Vector&) { return Matrix::Identity(1, 1); });
  ASSERT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_NEAR(r.x[0], 3.25, 1e-12);
  // Differenced, the slope is off by round-off and one correction follows.
  const auto fd = nhvi::newton_solve(shift, vec({-40.0}), NewtonOptions{});
  ASSERT_TRUE(fd.converged);
  EXPECT_LE(fd.iterations, 2);
}

TEST(NewtonSolve, TwoByTwoLinearSystem) {
  auto f = [](const Vector& x) { return vec({x[0] + 2 * x[1] - 5, 3 * x[0] - x[1] - 1}); };
  NewtonOptions o;
  o.tol = 1e-12;
  const auto r = nhvi::newton_solve(f, vec({0.0, 0.0}), o);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-12);
  EXPECT_NEAR(r.x[1], 2.0, 1e-12);
}

TEST(NewtonSolve, AnalyticJacobianIsUsed) {
  int calls = 0;
  auto jac = [&](const Vector& x) {
    ++calls;
    Matrix j(1, 1);
    j(0, 0) = 3 * x[0] * x[0];
    return j;
  };
  const auto r = nhvi::newton_solve([](const Vector& x) { return vec({x[0] * x[0] * x[0] - 8}); },
                                    vec({3.0}), NewtonOptions{}, jac);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 2.0, 1e-10);
  EXPECT_EQ(calls, r.iterations);
}

TEST(NewtonSolve, ReportsNonConvergence) {
  NewtonOptions o;
  o.max_iter = 3;
  // No real root: the iteration stalls or runs out of iterations.
  const auto r =
      nhvi::newton_solve([](const Vector& x) { return vec({x[0] * x[0] + 1.0}); }, vec({0.5}), o);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.residual_norm, o.tol);
}

TEST(NewtonSolve, SingularJacobianFallsBackToRegularisation) {
  // dF/dx = 0 at the start; the Tikhonov step still makes progress on the
  // second component.
  auto f = [](const Vector& x) { return vec({0.0 * x[0], x[1] - 1.0}); };
  const auto r = nhvi::newton_solve(f, vec({0.0, 0.0}), NewtonOptions{});
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.x[1], 1.0, 1e-10);
}

TEST(NewtonSolve, ZeroJacobianThrows) {
  auto f = [](const Vector&) { return vec({1.0}); };
  try {
    (void)nhvi::newton_solve(f, vec({0.0}), NewtonOptions{});
    FAIL();
  } catch (const nhvi::Error& e) {
    EXPECT_EQ(e.kind(), nhvi::ErrorKind::SingularJacobian);
  }
}

TEST(NewtonSolve, ConvergedMeansResidualWithinTolerance) {
  testing_support::Sampler rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.uniform(0.5, 3.0), b = rng.uniform(-2.0, 2.0);
    auto f = [&](const Vector& x) {
      return vec({std::sin(x[0]) + a * x[0] - b, x[1] * x[1] * x[1] + x[1] - a});
    };
    NewtonOptions o;
    o.tol = 1e-11;
    const auto r = nhvi::newton_solve(f, rng.vector(2, -1, 1), o);
    if (r.converged) {
      EXPECT_LE(nhvi::inf_norm(f(r.x)), o.tol);
      EXPECT_LE(r.residual_norm, o.tol);
    }
  }
}

TEST(NewtonSolve, Deterministic) {
  auto f = [](const Vector& x) { return vec({std::exp(x[0]) - 2.0 - x[1], x[0] * x[1] - 0.3}); };
  const auto a = nhvi::newton_solve(f, vec({0.1, 0.2}), NewtonOptions{});
  const auto b = nhvi::newton_solve(f, vec({0.1, 0.2}), NewtonOptions{});
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.x[0], b.x[0]);
  EXPECT_EQ(a.x[1], b.x[1]);
  EXPECT_EQ(a.residual_norm, b.residual_norm);
}

TEST(NewtonOptions, Validation) {
  NewtonOptions o;
  EXPECT_NO_THROW(o.validate());
  o.tol = 0.0;
  EXPECT_THROW(o.validate(), nhvi::Error);
  o = {};
  o.max_iter = 0;
  EXPECT_THROW(o.validate(), nhvi::Error);
  o = {};
  o.fd_eps = -1.0;
  EXPECT_THROW(o.validate(), nhvi::Error);
  EXPECT_DOUBLE_EQ(NewtonOptions{}.tol, 1e-10);
  EXPECT_EQ(NewtonOptions{}.max_iter, 50);
  EXPECT_EQ(NewtonOptions{}.max_backtracks, 30);
}
