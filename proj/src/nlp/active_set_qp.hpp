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

namespace nlp::detail {

/// min 1/2 x'Hx + g'x  s.t.  Aeq x = beq,  Ain x >= bin, with H positive
/// definite. Solved by a primal active-set method; the start point must be
/// feasible.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd Aeq;
  Eigen::VectorXd beq;
  Eigen::MatrixXd Ain;
  Eigen::VectorXd bin;
};

struct QpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd lam_eq;
  Eigen::VectorXd lam_in;
  int iterations = 0;
  bool ok = false;
};

QpResult solve_qp(const QpProblem& qp, const Eigen::VectorXd& x0,
                  int max_iter = 0);

}  // namespace nlp::detail
