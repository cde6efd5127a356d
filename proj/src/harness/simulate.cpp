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

#include "harness/simulate.hpp"

#include <cmath>
#include <sstream>

namespace harness {

namespace {

void solve_stats(const std::vector<StepRecord>& records, double& mean,
                 double& stddev) {
  mean = 0.0;
  stddev = 0.0;
  if (records.empty()) return;
  for (const auto& r : records) mean += r.solve_time_ms;
  mean /= records.size();
  if (records.size() < 2) return;
  double acc = 0.0;
  for (const auto& r : records) {
    const double d = r.solve_time_ms - mean;
    acc += d * d;
  }
  stddev = std::sqrt(acc / (records.size() - 1));
}

}  // namespace

TrajectoryLog run_closed_loop(const Scenario& s) {
  TrajectoryLog log;
  log.scenario_echo = s.echo;
  if (s.steps == 0) return log;

  const mpct::TrackingMpc mpc = build_controller(s);
  const plant::PlantModel& model = mpc.model();
  const setgeom::ImplicitSet output_set = build_output_set(s);

  Eigen::VectorXd x = s.x0;
  mpct::MpcQuery query;
  query.y_t = s.y_t;
  int hold = 0;

  auto fail = [&](int k, const std::string& why) {
    log.summary.status = "failed";
    std::ostringstream os;
    os << "step " << k << ": " << why;
    log.summary.diagnostic = os.str();
  };

  for (int k = 0; k < s.steps; ++k) {
    query.x = x;
    const mpct::MpcResult res = mpc.solve_step(query);
    if (!res.feasible) {
      fail(k, "solver returned " + nlp::to_string(res.nlp.status) +
                  " with constraint violation " +
                  std::to_string(res.nlp.max_violation));
      break;
    }

    const Eigen::VectorXd y = plant::output(model, x, res.u0);

    StepRecord rec;
    rec.k = k;
    rec.x = x;
    rec.u = res.u0;
    rec.y = y;
    rec.y_s = res.y_s;
    rec.theta = res.theta.size()
                    ? res.theta
                    : Eigen::VectorXd::Constant(
                          model.p, std::numeric_limits<double>::quiet_NaN());
    rec.lambda_lo = res.lambda_lo;
    rec.lambda_hi = res.lambda_hi;
    rec.cost = res.cost;
    rec.kkt = res.nlp.kkt_residual;
    rec.solve_time_ms = res.nlp.solve_time * 1e3;
    log.records.push_back(std::move(rec));

    // Invariants of an admissible closed loop.
    const double psi_y = output_set.psi(y);
    if (psi_y < -1e-6) {
      fail(k, "output left the admissible set (psi = " +
                  std::to_string(psi_y) + ")");
      break;
    }
    bool input_ok = true;
    for (int i = 0; i < model.m; ++i)
      input_ok = input_ok &&
                 res.u0(i) >= model.constraints.input_lo(i) - 1e-9 &&
                 res.u0(i) <= model.constraints.input_hi(i) + 1e-9;
    if (!input_ok) {
      fail(k, "input bound violated");
      break;
    }

    if ((y - s.y_t).norm() <= s.stop_tol) {
      if (++hold >= s.stop_hold) {
        log.summary.status = "converged";
        break;
      }
    } else {
      hold = 0;
    }

    x = plant::step(model, x, res.u0);
    query.warm = res.next_warm;
  }

  log.summary.steps_executed = static_cast<int>(log.records.size());
  if (log.summary.status == "not_run" && !log.records.empty())
    log.summary.status = "step_limit";
  if (!log.records.empty())
    log.summary.final_offset = (log.records.back().y - s.y_t).norm();
  solve_stats(log.records, log.summary.mean_solve_ms,
              log.summary.std_solve_ms);
  return log;
}

BenchmarkReport benchmark(const Scenario& a, const Scenario& b) {
  nlohmann::json ea = a.echo, eb = b.echo;
  ea["mpc"].erase("mode");
  eb["mpc"].erase("mode");
  if (ea != eb)
    throw ScenarioError(
        "(benchmark)",
        "scenarios must be identical except for mpc.mode; found other "
        "differences");
  if (a.mode == b.mode)
    throw ScenarioError("(benchmark)", "scenarios have the same mpc.mode");

  BenchmarkReport rep;
  rep.mode_a = mpct::to_string(a.mode);
  rep.mode_b = mpct::to_string(b.mode);

  const TrajectoryLog la = run_closed_loop(a);
  const TrajectoryLog lb = run_closed_loop(b);
  std::vector<StepRecord> ra = la.records, rb = lb.records;
  solve_stats(ra, rep.mean_a_ms, rep.std_a_ms);
  solve_stats(rb, rep.mean_b_ms, rep.std_b_ms);
  rep.ratio = rep.mean_b_ms > 0.0 ? rep.mean_a_ms / rep.mean_b_ms : 0.0;
  rep.summary_a = la.summary;
  rep.summary_b = lb.summary;
  return rep;
}

}  // namespace harness
