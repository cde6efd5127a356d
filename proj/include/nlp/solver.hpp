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
#include <string>
#include <vector>

namespace nlp {

using CostFn = std::function<double(const Eigen::VectorXd&)>;
using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using VecFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Vector-valued constraint block with optional analytic Jacobian.
struct ConstraintFn {
  int size = 0;
  VecFn value;
  JacFn jacobian;  // optional; finite differences otherwise
};

/// min cost(z)  s.t.  eq(z) = 0,  ineq(z) >= 0,  lower <= z <= upper.
struct NlpProblem {
  int dim = 0;
  CostFn cost;
  GradFn cost_grad;  // optional
  ConstraintFn eq;
  ConstraintFn ineq;
  Eigen::VectorXd lower;  // may be empty (no bounds) or contain +-inf
  Eigen::VectorXd upper;
  /// Optional diagonal seed for the quasi-Newton Hessian; aligns the first
  /// steps with strongly scaled objectives.
  Eigen::VectorXd hessian_seed;
};

enum class SolveStatus { Optimal, MaxIterations, Infeasible, NumericalFailure };

std::string to_string(SolveStatus s);

struct SolverOptions {
  double tol = 1e-7;        ///< KKT residual target
  double feas_tol = 1e-8;   ///< constraint violation target
  int max_iter = 200;
  double fd_step = 1e-6;    ///< central-difference step for fallbacks
  double mu_init = 10.0;    ///< initial exact-penalty weight
  double mu_max = 1e10;
  bool record_history = false;
};

struct IterationRecord {
  double merit_before = 0.0;
  double merit_after = 0.0;
  double mu = 0.0;
  double alpha = 0.0;
  double kkt = 0.0;
  double step_norm = 0.0;
};

struct NlpSolution {
  Eigen::VectorXd z;
  double cost = 0.0;
  double kkt_residual = 0.0;
  double max_violation = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::NumericalFailure;
  double solve_time = 0.0;  ///< seconds

  // Multipliers at z (eq, ineq, lower bound, upper bound), enabling an
  // independent recomputation of the reported KKT residual.
  Eigen::VectorXd lam_eq, lam_in, lam_lo, lam_hi;

  std::vector<IterationRecord> history;  // filled when record_history is set
};

/// Sequential quadratic programming with a damped quasi-Newton Hessian,
/// an exact-penalty line search, and elastic handling of inconsistent
/// constraint linearizations. Deterministic: identical inputs produce
/// identical outputs bit for bit.
NlpSolution solve(const NlpProblem& problem, const Eigen::VectorXd& z0,
                  const SolverOptions& options = {});

/// Max relative mismatch between the provided analytic derivatives and
/// central finite differences at z. Returns 0 when nothing is analytic.
double check_gradients(const NlpProblem& problem, const Eigen::VectorXd& z,
                       double fd_step = 1e-6);

/// KKT residual (stationarity and complementarity) recomputed from a
/// solution's point and multipliers; mirrors the solver's internal formula.
double kkt_residual(const NlpProblem& problem, const Eigen::VectorXd& z,
                    const Eigen::VectorXd& lam_eq, const Eigen::VectorXd& lam_in,
                    const Eigen::VectorXd& lam_lo, const Eigen::VectorXd& lam_hi,
                    double fd_step = 1e-6);

}  // namespace nlp
