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
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "nlp/solver.hpp"
#include "plant/model.hpp"
#include "setgeom/normal_set.hpp"

namespace mpct {

/// How the artificial reference is parameterized inside the optimizer.
///  - Standard: directly as an output-space point, kept inside the output
///    set by a nonlinear inequality.
///  - Homeo: as a point of the straightened box, mapped through the
///    normalizing change of coordinates (fiber extremes resolved inside
///    the model functions).
///  - Normal: as a straightened point plus explicit fiber-extreme
///    variables pinned to the set boundary by equality constraints.
enum class Mode { Standard, Homeo, Normal };

std::string to_string(Mode m);

struct MpcConfig {
  int Nc = 4;               ///< control horizon
  int Np = 4;               ///< prediction horizon (must equal Nc here;
                            ///< the terminal state is pinned to the
                            ///< artificial equilibrium, no tail cost)
  Eigen::MatrixXd Q;        ///< state stage weight (PSD)
  Eigen::MatrixXd R;        ///< input stage weight (PD)
  Eigen::MatrixXd T;        ///< reference offset weight (PD)
  double epsilon_lambda = 1e-3;  ///< minimum gap between fiber extremes
  double delta_eps = 0.0;        ///< interior margin on the reference set
  nlp::SolverOptions solver;
  setgeom::FiberOptions fiber;
};

/// Decision data carried between consecutive closed-loop solves.
struct WarmStart {
  Eigen::MatrixXd u_seq;  ///< m x Nc
  Eigen::VectorXd ref;    ///< reference block of the decision vector
  bool valid = false;
};

struct MpcQuery {
  Eigen::VectorXd x;    ///< current state
  Eigen::VectorXd y_t;  ///< target output (need not be admissible)
  WarmStart warm;       ///< ignored unless valid
};

struct MpcResult {
  Eigen::VectorXd u0;       ///< input to apply
  Eigen::MatrixXd u_seq;    ///< full planned input sequence, m x Nc
  Eigen::VectorXd y_s;      ///< artificial reference, output space
  Eigen::VectorXd theta;    ///< transformed reference (empty for Standard)
  double lambda_lo = std::numeric_limits<double>::quiet_NaN();
  double lambda_hi = std::numeric_limits<double>::quiet_NaN();
  double cost = 0.0;
  bool feasible = false;    ///< max violation of the returned plan <= 1e-6
  nlp::NlpSolution nlp;
  WarmStart next_warm;
};

struct OffsetOptimum {
  Eigen::VectorXd theta;  ///< offset minimizer in the straightened box
  Eigen::VectorXd y;      ///< its output-space image
};

/// Receding-horizon tracking controller with an artificial reference.
/// Build once per plant/set/configuration, then call solve_step per
/// closed-loop step (const, safe to share across threads).
class TrackingMpc {
 public:
  static TrackingMpc build_standard(plant::PlantModel model, MpcConfig cfg);
  static TrackingMpc build_normal(
      plant::PlantModel model, setgeom::NormalSetChart ns, MpcConfig cfg,
      std::optional<setgeom::NormalityCertificate> cert = std::nullopt);
  static TrackingMpc build_homeo(
      plant::PlantModel model, setgeom::NormalSetChart ns, MpcConfig cfg,
      std::optional<setgeom::NormalityCertificate> cert = std::nullopt);

  MpcResult solve_step(const MpcQuery& query) const;

  /// The underlying program for a query (for derivative checks and tests).
  nlp::NlpProblem transcribe(const MpcQuery& query) const;
  Eigen::VectorXd initial_guess(const MpcQuery& query) const;

  /// Transformed image of an arbitrary target output (extends beyond the
  /// set; Standard mode returns the target unchanged).
  Eigen::VectorXd target_theta(const Eigen::VectorXd& y_t) const;

  Mode mode() const;
  const MpcConfig& config() const;
  const plant::PlantModel& model() const;

  struct Core;  ///< implementation detail, defined in the source file

 private:
  explicit TrackingMpc(std::shared_ptr<const Core> core);
  std::shared_ptr<const Core> core_;
};

/// Minimizer of (theta - image of y_t)' T (theta - image of y_t) over the
/// straightened box, with its output-space preimage. This is the point a
/// converged controller settles on when the target is not admissible.
OffsetOptimum offset_optimum(const setgeom::NormalSetChart& ns,
                             const Eigen::VectorXd& y_t,
                             const Eigen::MatrixXd& T,
                             const setgeom::FiberOptions& fiber = {});

}  // namespace mpct
