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

#include <limits>
#include <string>
#include <vector>

#include "harness/scenario.hpp"

namespace harness {

struct StepRecord {
  int k = 0;
  Eigen::VectorXd x, u, y, y_s, theta;
  double lambda_lo = std::numeric_limits<double>::quiet_NaN();
  double lambda_hi = std::numeric_limits<double>::quiet_NaN();
  double cost = 0.0;
  double kkt = 0.0;
  double solve_time_ms = 0.0;
};

struct RunSummary {
  std::string status = "not_run";  // converged | step_limit | failed | not_run
  int steps_executed = 0;
  double final_offset = std::numeric_limits<double>::quiet_NaN();
  double mean_solve_ms = 0.0;
  double std_solve_ms = 0.0;
  std::string diagnostic;  // set when status == "failed"
};

struct TrajectoryLog {
  nlohmann::json scenario_echo;
  std::vector<StepRecord> records;
  RunSummary summary;
};

/// Runs the scenario's closed loop: solve, apply the first input, step the
/// plant. Each recorded output is verified against the output set
/// (psi >= -1e-6) and the input bounds (1e-9 slack); a violation or solver
/// failure aborts the run with status "failed" and a diagnostic.
TrajectoryLog run_closed_loop(const Scenario& s);

struct BenchmarkReport {
  std::string mode_a, mode_b;
  double mean_a_ms = 0.0, std_a_ms = 0.0;
  double mean_b_ms = 0.0, std_b_ms = 0.0;
  double ratio = 0.0;  ///< mean_a / mean_b
  RunSummary summary_a, summary_b;
};

/// Runs two scenarios that must be identical except for mpc.mode and
/// reports per-step solve-time statistics side by side.
BenchmarkReport benchmark(const Scenario& a, const Scenario& b);

}  // namespace harness
