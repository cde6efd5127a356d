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

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

#include "setgeom/implicit_set.hpp"

namespace plant {

struct no_steady_state_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct nonfinite_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pointwise-in-time constraints: a box on inputs and an implicit set on
/// outputs. epsilon_interior is the radius of the interior ball used when
/// the artificial reference must stay strictly inside the output set.
struct ConstraintSet {
  Eigen::VectorXd input_lo;
  Eigen::VectorXd input_hi;
  setgeom::ImplicitSet output_set;
  double epsilon_interior = 1e-3;
};

using StateMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&,
                                               const Eigen::VectorXd&)>;
using StateJac = std::function<Eigen::MatrixXd(const Eigen::VectorXd&,
                                               const Eigen::VectorXd&)>;
using SteadyMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using SteadyJac = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Discrete-time plant x+ = f(x,u), y = h(x,u) with constraint data and
/// optional analytic Jacobians / steady-state maps. Missing Jacobians fall
/// back to central finite differences; a missing steady-state map falls
/// back to a damped Newton solve.
struct PlantModel {
  int n = 0;  ///< states
  int m = 0;  ///< inputs
  int p = 0;  ///< outputs

  StateMap f;
  StateMap h;
  StateJac f_x, f_u, h_x, h_u;  // optional

  ConstraintSet constraints;

  SteadyMap g_x, g_u;          // optional: steady state/input for output y
  SteadyJac g_x_jac, g_u_jac;  // optional
};

/// One step of the dynamics; validates dimensions and finiteness.
Eigen::VectorXd step(const PlantModel& model, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& u);

Eigen::VectorXd output(const PlantModel& model, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& u);

/// Steady pair (x_s, u_s) with h(x_s, u_s) = y and f(x_s, u_s) = x_s.
/// Uses the analytic maps when present, damped Newton otherwise.
std::pair<Eigen::VectorXd, Eigen::VectorXd> steady_state(
    const PlantModel& model, const Eigen::VectorXd& y);

Eigen::MatrixXd step_jacobian_x(const PlantModel& model,
                                const Eigen::VectorXd& x,
                                const Eigen::VectorXd& u);
Eigen::MatrixXd step_jacobian_u(const PlantModel& model,
                                const Eigen::VectorXd& x,
                                const Eigen::VectorXd& u);
Eigen::MatrixXd output_jacobian_x(const PlantModel& model,
                                  const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& u);
Eigen::MatrixXd output_jacobian_u(const PlantModel& model,
                                  const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& u);

Eigen::MatrixXd steady_state_jacobian(const PlantModel& model,
                                      const Eigen::VectorXd& y);
Eigen::MatrixXd steady_input_jacobian(const PlantModel& model,
                                      const Eigen::VectorXd& y);

}  // namespace plant
