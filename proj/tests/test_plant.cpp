// Copyright 2026 The tracknc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "plant/ball_on_plate.hpp"

using namespace plant;

namespace {

Eigen::VectorXd state(double x1, double x1d, double x2, double x2d, double p1,
                      double p1d, double p2, double p2d) {
  Eigen::VectorXd x(8);
  x << x1, x1d, x2, x2d, p1, p1d, p2, p2d;
  return x;
}

Eigen::Vector2d u2(double a, double b) { return Eigen::Vector2d(a, b); }

}  // namespace

TEST_CASE("ball-on-plate dimensions and input box") {
  const PlantModel bp = ball_on_plate(0.25);
  CHECK(bp.n == 8);
  CHECK(bp.m == 2);
  CHECK(bp.p == 2);
  CHECK(bp.constraints.input_lo(0) == -0.1);
  CHECK(bp.constraints.input_hi(1) == 0.1);
  CHECK(bp.f_x);  // analytic Jacobians are wired in
  CHECK(bp.g_x);  // and the steady maps
}

TEST_CASE("rest is a fixed point; tilting accelerates the ball") {
  const PlantModel bp = ball_on_plate(0.25);
  const Eigen::VectorXd rest = state(0.3, 0, -0.4, 0, 0, 0, 0, 0);
  CHECK((step(bp, rest, u2(0, 0)) - rest).lpNorm<Eigen::Infinity>() == 0.0);

  // Rolling without slipping scales gravity by 5/7.
  const Eigen::VectorXd tilted = state(0, 0, 0, 0, 0.1, 0, 0, 0);
  const Eigen::VectorXd next = step(bp, tilted, u2(0, 0));
  CHECK(next(1) == doctest::Approx(0.1748867530902472).epsilon(1e-15));
  CHECK(next(3) == 0.0);
}

TEST_CASE("one forward-Euler step, all couplings active") {
  const PlantModel bp = ball_on_plate(0.25);
  const Eigen::VectorXd x = state(-0.1, 0.2, 1.0, -0.3, 0.1, 0.05, -0.02, 0.04);
  const Eigen::VectorXd next = step(bp, x, u2(0.1, -0.05));
  Eigen::VectorXd expect(8);
  expect << -0.05, 0.37519925309024721, 0.925, -0.33478337861814239, 0.1125,
      0.075, -0.01, 0.0275;
  CHECK((next - expect).lpNorm<Eigen::Infinity>() < 1e-12);

  const Eigen::VectorXd y = output(bp, x, u2(0.1, -0.05));
  CHECK(y(0) == -0.1);
  CHECK(y(1) == 1.0);
}

TEST_CASE("analytic jacobians match finite differences") {
  const PlantModel bp = ball_on_plate(0.25);
  const Eigen::VectorXd x = state(-0.1, 0.2, 1.0, -0.3, 0.1, 0.05, -0.02, 0.04);
  const Eigen::Vector2d u = u2(0.05, -0.02);

  PlantModel fd = bp;  // strip the analytic Jacobians to force differencing
  fd.f_x = nullptr;
  fd.f_u = nullptr;
  fd.h_x = nullptr;
  fd.h_u = nullptr;

  CHECK((step_jacobian_x(bp, x, u) - step_jacobian_x(fd, x, u))
            .lpNorm<Eigen::Infinity>() < 1e-7);
  CHECK((step_jacobian_u(bp, x, u) - step_jacobian_u(fd, x, u))
            .lpNorm<Eigen::Infinity>() < 1e-7);
  CHECK((output_jacobian_x(bp, x, u) - output_jacobian_x(fd, x, u))
            .lpNorm<Eigen::Infinity>() < 1e-7);
  CHECK((output_jacobian_u(bp, x, u) - output_jacobian_u(fd, x, u))
            .lpNorm<Eigen::Infinity>() < 1e-7);
}

TEST_CASE("steady state: analytic map and newton fallback agree") {
  const PlantModel bp = ball_on_plate(0.25);
  const Eigen::Vector2d y = u2(0.3, -0.4);

  const auto [xs, us] = steady_state(bp, y);
  CHECK((xs - state(0.3, 0, -0.4, 0, 0, 0, 0, 0)).lpNorm<Eigen::Infinity>() ==
        0.0);
  CHECK(us.lpNorm<Eigen::Infinity>() == 0.0);

  PlantModel newton = bp;
  newton.g_x = nullptr;
  newton.g_u = nullptr;
  newton.g_x_jac = nullptr;
  newton.g_u_jac = nullptr;
  const auto [xn, un] = steady_state(newton, y);
  CHECK((xn - xs).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK((un - us).lpNorm<Eigen::Infinity>() < 1e-8);

  // The pair really is steady.
  CHECK((step(bp, xn, un) - xn).lpNorm<Eigen::Infinity>() < 1e-9);
  CHECK((output(bp, xn, un) - y).lpNorm<Eigen::Infinity>() < 1e-9);

  // Jacobian of the steady map, analytic vs differenced.
  CHECK((steady_state_jacobian(bp, y) - steady_state_jacobian(newton, y))
            .lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("euler discretization converges at first order") {
  // Integrate the same trajectory with steps Ts and Ts/2 against a fine
  // reference; the error ratio should approach 2.
  const Eigen::VectorXd x0 = state(0.1, 0.05, -0.2, 0.1, 0.08, 0.02, -0.05, 0.01);
  const Eigen::Vector2d u = u2(0.03, -0.04);
  const double horizon = 1.0;

  auto integrate = [&](double ts) {
    const PlantModel bp = ball_on_plate(ts);
    Eigen::VectorXd x = x0;
    const int steps = static_cast<int>(std::lround(horizon / ts));
    for (int k = 0; k < steps; ++k) x = step(bp, x, u);
    return x;
  };

  const Eigen::VectorXd fine = integrate(1.0 / 4096);
  const double e1 = (integrate(0.25) - fine).norm();
  const double e2 = (integrate(0.125) - fine).norm();
  CHECK(e1 / e2 > 1.7);
  CHECK(e1 / e2 < 2.3);
}

TEST_CASE("dimension and finiteness guards") {
  const PlantModel bp = ball_on_plate(0.25);
  CHECK_THROWS_AS(step(bp, Eigen::VectorXd::Zero(5), u2(0, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(step(bp, Eigen::VectorXd::Zero(8), Eigen::VectorXd::Zero(3)),
                  std::invalid_argument);

  Eigen::VectorXd bad = Eigen::VectorXd::Zero(8);
  bad(2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(step(bp, bad, u2(0, 0)), nonfinite_error);
  bad(2) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(step(bp, bad, u2(0, 0)), nonfinite_error);

  CHECK_THROWS_AS(ball_on_plate(0.0), std::invalid_argument);
}
