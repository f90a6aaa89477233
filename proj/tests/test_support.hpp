#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "nhvi/discretization.hpp"
#include "nhvi/models.hpp"

namespace testing_support {

using nhvi::Vector;

inline std::shared_ptr<const nhvi::MechanicalModel> particle(double g = 9.8) {
  return nhvi::make_particle({1.0, g});
}

inline std::shared_ptr<const nhvi::Se2BodyModel> ellipse() {
  nhvi::Se2BodyParams p;
  p.shape = nhvi::EllipseShape{1.0, 0.5};
  return nhvi::make_se2_body(p);
}

inline std::shared_ptr<const nhvi::Se2BodyModel> star() {
  nhvi::Se2BodyParams p;
  p.shape = nhvi::StarShape{1.0};
  p.inertia = 0.5;
  return nhvi::make_se2_body(p);
}

inline std::shared_ptr<const nhvi::PendulumModel> pendulum(nhvi::ConstraintGain f = {}) {
  nhvi::PendulumParams p;
  p.gain = f;
  return nhvi::make_pendulum(p);
}

/// Deterministic source of random configurations.
class Sampler {
 public:
  explicit Sampler(unsigned seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Vector vector(int n, double lo, double hi) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = uniform(lo, hi);
    return x;
  }

  /// A point of the model's configuration space away from poles and corners.
  Vector configuration(const nhvi::MechanicalModel& model) {
    if (model.name() == "pendulum") return nhvi::vec({uniform(0.3, 2.8), uniform(-3.0, 3.0)});
    if (model.name() == "se2_body") {
      return nhvi::vec({uniform(-3.0, 3.0), uniform(-2.0, 2.0), uniform(0.5, 4.0)});
    }
    return nhvi::vec({uniform(-2.0, 2.0), uniform(0.1, 3.0)});
  }

  /// A point with c(q) = 0, found by moving one coordinate.
  Vector boundary_point(const nhvi::MechanicalModel& model) {
    if (model.name() == "pendulum") {
      const double s = std::asin(1.5 / 2.0);
      const double branches[] = {s, std::numbers::pi - s, std::numbers::pi + s,
                                 2 * std::numbers::pi - s};
      const int b = static_cast<int>(uniform(0.0, 4.0)) % 4;
      return nhvi::vec({branches[b] + 2 * std::numbers::pi * std::round(uniform(-2.0, 2.0)),
                        uniform(-5.0, 5.0)});
    }
    if (const auto* body = dynamic_cast<const nhvi::Se2BodyModel*>(&model)) {
      const double theta = uniform(-6.0, 6.0);
      return nhvi::vec({theta, uniform(-3.0, 3.0), body->support(theta)});
    }
    return nhvi::vec({uniform(-5.0, 5.0), 0.0});
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testing_support
