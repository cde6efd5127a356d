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

#include <string>

#include "harness/simulate.hpp"

namespace harness {

/// Column header for a log with the given dimensions:
/// k, x1..xn, u1..um, y1..yp, ys1..ysp, theta1..thetap,
/// lambda_lo, lambda_hi, cost, kkt, solve_time_ms
std::string csv_header(int n, int m, int p);

/// Writes the per-step table; numbers are printed with enough digits to
/// round-trip exactly (missing values as nan).
void emit_csv(const TrajectoryLog& log, const std::string& path);

/// Writes the full log: the echoed scenario, the summary, and the steps.
void emit_json(const TrajectoryLog& log, const std::string& path);

/// Reads a log written by emit_json (nulls become NaN again).
TrajectoryLog load_log_json(const std::string& path);

}  // namespace harness
