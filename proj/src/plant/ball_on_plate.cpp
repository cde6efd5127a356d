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

#include "plant/ball_on_plate.hpp"

#include <cmath>

namespace plant {

namespace {

constexpr double kGravity = 9.81;
constexpr double kBallFactor = 5.0 / 7.0;  // solid ball rolling on a plane

// State layout.
enum : int { X1, X1D, X2, X2D, PHI1, PHI1D, PHI2, PHI2D };

setgeom::ImplicitSet free_output_set() {
  setgeom::Box bb = {{-1e6, 1e6}, {-1e6, 1e6}};
  auto psi = [](const Eigen::VectorXd&) { return 1.0; };
  auto grad = [](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return Eigen::VectorXd::Zero(y.size());
  };
  return setgeom::ImplicitSet(2, std::move(bb), psi, grad);
}

}  // namespace

PlantModel ball_on_plate(double Ts) {
  return ball_on_plate(Ts, free_output_set());
}

PlantModel ball_on_plate(double Ts, setgeom::ImplicitSet output_set,
                         double epsilon_interior) {
  if (!(Ts > 0.0)) throw std::invalid_argument("ball_on_plate: Ts must be > 0");
  if (output_set.dim() != 2)
    throw std::invalid_argument("ball_on_plate: output set must be 2-D");

  PlantModel model;
  model.n = 8;
  model.m = 2;
  model.p = 2;

  model.f = [Ts](const Eigen::VectorXd& x,
                 const Eigen::VectorXd& u) -> Eigen::VectorXd {
    const double w1 = x(PHI1D), w2 = x(PHI2D);
    Eigen::VectorXd xn(8);
    xn(X1) = x(X1) + Ts * x(X1D);
    xn(X1D) = x(X1D) + Ts * kBallFactor *
                           (x(X1) * w1 * w1 + x(X2) * w1 * w2 +
                            kGravity * std::sin(x(PHI1)));
    xn(X2) = x(X2) + Ts * x(X2D);
    xn(X2D) = x(X2D) + Ts * kBallFactor *
                           (x(X2) * w2 * w2 + x(X1) * w1 * w2 +
                            kGravity * std::sin(x(PHI2)));
    xn(PHI1) = x(PHI1) + Ts * w1;
    xn(PHI1D) = w1 + Ts * u(0);
    xn(PHI2) = x(PHI2) + Ts * w2;
    xn(PHI2D) = w2 + Ts * u(1);
    return xn;
  };

  model.h = [](const Eigen::VectorXd& x,
               const Eigen::VectorXd&) -> Eigen::VectorXd {
    Eigen::VectorXd y(2);
    y << x(X1), x(X2);
    return y;
  };

  model.f_x = [Ts](const Eigen::VectorXd& x,
                   const Eigen::VectorXd&) -> Eigen::MatrixXd {
    const double w1 = x(PHI1D), w2 = x(PHI2D);
    const double c = Ts * kBallFactor;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(8, 8);
    A(X1, X1D) = Ts;
    A(X1D, X1) = c * w1 * w1;
    A(X1D, X2) = c * w1 * w2;
    A(X1D, PHI1) = c * kGravity * std::cos(x(PHI1));
    A(X1D, PHI1D) = c * (2.0 * x(X1) * w1 + x(X2) * w2);
    A(X1D, PHI2D) = c * x(X2) * w1;
    A(X2, X2D) = Ts;
    A(X2D, X2) = c * w2 * w2;
    A(X2D, X1) = c * w1 * w2;
    A(X2D, PHI2) = c * kGravity * std::cos(x(PHI2));
    A(X2D, PHI2D) = c * (2.0 * x(X2) * w2 + x(X1) * w1);
    A(X2D, PHI1D) = c * x(X1) * w2;
    A(PHI1, PHI1D) = Ts;
    A(PHI2, PHI2D) = Ts;
    return A;
  };

  model.f_u = [Ts](const Eigen::VectorXd&,
                   const Eigen::VectorXd&) -> Eigen::MatrixXd {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(8, 2);
    B(PHI1D, 0) = Ts;
    B(PHI2D, 1) = Ts;
    return B;
  };

  model.h_x = [](const Eigen::VectorXd&,
                 const Eigen::VectorXd&) -> Eigen::MatrixXd {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2, 8);
    H(0, X1) = 1.0;
    H(1, X2) = 1.0;
    return H;
  };

  model.h_u = [](const Eigen::VectorXd&,
                 const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Zero(2, 2);
  };

  // Equilibria: ball at rest at (y1, y2) on a level plate with zero input.
  model.g_x = [](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    Eigen::VectorXd xs = Eigen::VectorXd::Zero(8);
    xs(X1) = y(0);
    xs(X2) = y(1);
    return xs;
  };
  model.g_u = [](const Eigen::VectorXd&) -> Eigen::VectorXd {
    return Eigen::VectorXd::Zero(2);
  };
  model.g_x_jac = [](const Eigen::VectorXd&) -> Eigen::MatrixXd {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(8, 2);
    G(X1, 0) = 1.0;
    G(X2, 1) = 1.0;
    return G;
  };
  model.g_u_jac = [](const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Zero(2, 2);
  };

  model.constraints.input_lo = Eigen::Vector2d(-0.1, -0.1);
  model.constraints.input_hi = Eigen::Vector2d(0.1, 0.1);
  model.constraints.output_set = std::move(output_set);
  model.constraints.epsilon_interior = epsilon_interior;
  return model;
}

}  // namespace plant
