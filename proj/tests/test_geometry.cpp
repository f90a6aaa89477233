#include <gtest/gtest.h>

#include <numbers>

#include "nhvi/geometry.hpp"
#include "nhvi/models.hpp"
#include "oracle_values.hpp"
#include "test_support.hpp"

using nhvi::Matrix;
using nhvi::Vector;
using nhvi::vec;
namespace ts = testing_support;

namespace {

nhvi::BoundaryFrame ellipse_frame_at(double theta) {
  const auto body = ts::ellipse();
  return nhvi::boundary_frame(*body, vec({theta, 0.3, body->support(theta)}));
}

}  // namespace

TEST(Pullback, Se2CombinesThetaAndY) {
  const auto f = ellipse_frame_at(std::numbers::pi / 4);
  const Vector out = nhvi::pullback_cotangent(f, vec({1.0, 2.0, 3.0}));
  ASSERT_EQ(out.size(), 2);
  EXPECT_NEAR(out[0], 2.0, 1e-12);
  EXPECT_NEAR(out[1], 1.0 + oracle::kEllipseSlopeQuarter * 3.0, 1e-12);
  EXPECT_NEAR(out[1], 2.4230, 1e-4);
}

TEST(Pullback, ZeroAndParticle) {
  const auto f = ellipse_frame_at(0.7);
  EXPECT_EQ(nhvi::pullback_cotangent(f, Vector::Zero(3)), Vector::Zero(2));
  const auto pf = nhvi::boundary_frame(*ts::particle(), vec({1.0, 0.0}));
  const Vector out = nhvi::pullback_cotangent(pf, vec({5.0, -7.0}));
  ASSERT_EQ(out.size(), 1);
  EXPECT_EQ(out[0], 5.0);
}

TEST(Pushforward, Se2AndParticle) {
  const auto f = ellipse_frame_at(std::numbers::pi / 4);
  EXPECT_EQ(nhvi::push_cotangent(f, vec({4.0, 6.0})), vec({6.0, 4.0, 0.0}));
  EXPECT_EQ(nhvi::push_cotangent(f, Vector::Zero(2)), Vector::Zero(3));
  const auto pf = nhvi::boundary_frame(*ts::particle(), vec({1.0, 0.0}));
  EXPECT_EQ(nhvi::push_cotangent(pf, vec({9.0})), vec({9.0, 0.0}));
}

TEST(Cotangent, DimensionMismatch) {
  const auto f = ellipse_frame_at(0.2);
  EXPECT_THROW((void)nhvi::pullback_cotangent(f, vec({1.0, 2.0})), nhvi::Error);
  EXPECT_THROW((void)nhvi::push_cotangent(f, vec({1.0, 2.0, 3.0})), nhvi::Error);
}

TEST(BoundaryFrame, PendulumBases) {
  const double th = std::asin(0.75);
  const auto f = nhvi::boundary_frame(*ts::pendulum(), vec({th, 0.4}));
  EXPECT_EQ(f.E, (Matrix(2, 1) << 0, 1).finished());
  EXPECT_EQ(f.P, (Matrix(1, 2) << 0, 1).finished());
  EXPECT_DOUBLE_EQ((f.P * f.E)(0, 0), 1.0);
}

TEST(BoundaryFrame, ParticleBases) {
  const auto f = nhvi::boundary_frame(*ts::particle(), vec({-2.0, 0.0}));
  EXPECT_EQ(f.E, (Matrix(2, 1) << 1, 0).finished());
  EXPECT_EQ(f.P, (Matrix(1, 2) << 1, 0).finished());
}

TEST(BoundaryFrame, EllipseAtQuarterTurn) {
  const auto f = ellipse_frame_at(std::numbers::pi / 4);
  EXPECT_NEAR(f.E(2, 1), 0.4743, 1e-4);
  EXPECT_EQ(f.E.col(0), vec({0.0, 1.0, 0.0}));
  EXPECT_LE((f.P * f.E - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(f.normal, vec({-f.E(2, 1), 0.0, 1.0}));
}

TEST(BoundaryFrame, RejectsInteriorPoints) {
  try {
    (void)nhvi::boundary_frame(*ts::particle(), vec({0.0, 0.1}));
    FAIL();
  } catch (const nhvi::Error& e) {
    EXPECT_EQ(e.kind(), nhvi::ErrorKind::NotOnBoundary);
  }
  // Within the frame tolerance is fine.
  EXPECT_NO_THROW((void)nhvi::boundary_frame(*ts::particle(), vec({0.0, 5e-9})));
}

TEST(BoundaryFrame, StarCornerIsDegenerate) {
  const auto s = ts::star();
  try {
    (void)nhvi::boundary_frame(*s, vec({0.0, 0.0, s->support(0.0)}));
    FAIL();
  } catch (const nhvi::Error& e) {
    EXPECT_EQ(e.kind(), nhvi::ErrorKind::DegenerateFrame);
  }
  const double th = 0.3;
  EXPECT_NO_THROW((void)nhvi::boundary_frame(*s, vec({th, 0.0, s->support(th)})));
}

TEST(BoundaryFrame, WrongLength) {
  EXPECT_THROW((void)nhvi::boundary_frame(*ts::particle(), vec({0.0, 0.0, 0.0})), nhvi::Error);
}

// P E = I and pullback(push(p~)) = p~ at random boundary points.
TEST(BoundaryFrameProperty, LeftInverseAtRandomPoints) {
  ts::Sampler rng(2024);
  const std::shared_ptr<const nhvi::MechanicalModel> models[] = {ts::particle(), ts::ellipse(),
                                                                 ts::star(), ts::pendulum()};
  for (const auto& model : models) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vector q = rng.boundary_point(*model);
      const auto f = nhvi::boundary_frame(*model, q);
      const int n = model->dim();
      EXPECT_LE((f.P * f.E - Matrix::Identity(n - 1, n - 1)).cwiseAbs().maxCoeff(), 1e-12);
      const Vector pt = rng.vector(n - 1, -10, 10);
      EXPECT_LE(nhvi::inf_norm(nhvi::pullback_cotangent(f, nhvi::push_cotangent(f, pt)) - pt),
                1e-12);
      // The boundary is transverse: the normal is not in the span of E.
      const Vector along = f.E * (f.E.transpose() * f.E).ldlt().solve(f.E.transpose() * f.normal);
      EXPECT_GT((f.normal - along).norm(), 1e-3) << model->name();
    }
  }
}

TEST(GapGradientProperty, MatchesFiniteDifferences) {
  ts::Sampler rng(99);
  const std::shared_ptr<const nhvi::MechanicalModel> models[] = {ts::particle(), ts::ellipse(),
                                                                 ts::pendulum()};
  for (const auto& model : models) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vector q = rng.configuration(*model);
      const Matrix fd = nhvi::fd_jacobian(
          [&](const Vector& x) { return vec({model->boundary_gap(x)}); }, q, 1e-7);
      const Vector g = model->boundary_gap_grad(q);
      EXPECT_LE(nhvi::inf_norm(fd.row(0).transpose() - g), 1e-6) << model->name();
    }
  }
}

TEST(Omega, PendulumAnnihilatesConstraintDistribution) {
  const auto p = ts::pendulum();
  ts::Sampler rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const double th = rng.uniform(-10, 10);
    const Matrix w = p->omega(vec({th, rng.uniform(-3, 3)}));
    EXPECT_EQ((w * vec({1.0, p->gain(th)}))(0), 0.0);
  }
}

TEST(Omega, FullRowRank) {
  const auto p = ts::pendulum();
  ts::Sampler rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix w = p->omega(rng.configuration(*p));
    Eigen::FullPivLU<Matrix> lu(w);
    lu.setThreshold(1e-10);
    EXPECT_EQ(lu.rank(), 1);
  }
  EXPECT_EQ(ts::particle()->omega(vec({0.0, 1.0})).rows(), 0);
}
