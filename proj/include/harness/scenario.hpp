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
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "mpct/tracking_mpc.hpp"
#include "plant/ball_on_plate.hpp"
#include "setgeom/normal_set.hpp"

namespace harness {

/// Scenario parsing/validation failure; field names the offending JSON
/// path, e.g. "plant.Ts".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// A fully validated simulation description. `echo` holds the scenario
/// with every default filled in; rebuilding from the echo reproduces the
/// run exactly.
struct Scenario {
  nlohmann::json echo;

  std::string plant_name;
  double Ts = 0.0;

  struct Primitive {
    std::string kind;  // "ellipsoid"
    Eigen::VectorXd center;
    Eigen::MatrixXd shape;
  };
  std::vector<Primitive> primitives;
  nlohmann::json compose;  // {"prim": i} | {"op": "union"/"intersection", "args": [...]}
  setgeom::RFunction rfunction = setgeom::RFunction::Smooth;

  bool has_chart = false;
  std::string chart_kind;  // "polar" | "identity"
  Eigen::Vector2d chart_center = Eigen::Vector2d::Zero();
  double branch_lo = -M_PI;
  setgeom::Box basis_region;

  mpct::Mode mode = mpct::Mode::Standard;
  mpct::MpcConfig mpc;

  Eigen::VectorXd x0;  // full state vector
  Eigen::VectorXd y_t;
  int steps = 200;
  double stop_tol = 0.02;
  int stop_hold = 10;
};

Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

setgeom::ImplicitSet build_output_set(const Scenario& s);
setgeom::Chart build_chart(const Scenario& s);
setgeom::NormalSetChart build_normal_chart(const Scenario& s);
plant::PlantModel build_plant(const Scenario& s);

/// Builds the controller for the scenario's mode; certifies the fiber
/// structure once for the transformed modes (reported as ScenarioError on
/// failure).
mpct::TrackingMpc build_controller(const Scenario& s);

/// Replaces the scenario's mode (used by CLI overrides and benchmark
/// pairing); keeps the echo in sync.
void set_mode(Scenario& s, mpct::Mode mode);

}  // namespace harness
