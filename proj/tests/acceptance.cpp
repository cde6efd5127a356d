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
//
// End-to-end acceptance gate for the tracking controller. Each numbered
// check prints exactly one [PASS]/[FAIL] line; the binary exits nonzero if
// any check fails. All tolerances are pinned here, in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "harness/scenario.hpp"
#include "harness/simulate.hpp"
#include "mpct/tracking_mpc.hpp"
#include "nlp/solver.hpp"
#include "plant/model.hpp"

using harness::Scenario;
using harness::TrajectoryLog;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void report(int id, bool pass, const std::string& what,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

struct TimedRun {
  TrajectoryLog log;
  double seconds = 0.0;
};

TimedRun timed_run(const Scenario& s) {
  const auto t0 = std::chrono::steady_clock::now();
  TimedRun out;
  out.log = harness::run_closed_loop(s);
  out.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return out;
}

// Largest consecutive artificial-reference movement over the last `window`
// records.
double reference_drift(const TrajectoryLog& log, int window) {
  const int n = static_cast<int>(log.records.size());
  double drift = 0.0;
  for (int k = std::max(1, n - window + 1); k < n; ++k)
    drift = std::max(drift,
                     (log.records[k].y_s - log.records[k - 1].y_s).norm());
  return drift;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------

TrajectoryLog criterion_1_standard_stalls(const Scenario& standard) {
  const TimedRun run = timed_run(standard);
  const auto& s = run.log.summary;
  const double drift = reference_drift(run.log, 20);
  const bool clean = s.status != "failed" && !run.log.records.empty();
  const bool stalled = s.final_offset >= 0.1 && drift <= 1e-6;
  const bool in_time = run.seconds <= 60.0;
  report(1, clean && stalled && in_time,
         "standard mode stalls short of the target on the two-ellipse set",
         "status=" + s.status + " steps=" + std::to_string(s.steps_executed) +
             " final_offset=" + fmt(s.final_offset) +
             " ref_drift_last20=" + fmt(drift) + " time=" + fmt(run.seconds) +
             "s" + (s.diagnostic.empty() ? "" : " diag=" + s.diagnostic));
  return run.log;
}

void criterion_2_normal_converges(const Scenario& normal) {
  // Pinned step budget: the point is reaching the target this fast.
  json j = normal.echo;
  j["run"]["steps"] = 200;
  const TimedRun run = timed_run(harness::scenario_from_json(j));
  const auto& s = run.log.summary;

  const setgeom::ImplicitSet set = harness::build_output_set(normal);
  bool invariants = true;
  for (const auto& rec : run.log.records) {
    invariants = invariants && set.psi(rec.y) >= -1e-6 &&
                 rec.u.lpNorm<Eigen::Infinity>() <= 0.1 + 1e-9;
  }
  const bool converged = s.status == "converged" && s.final_offset <= 0.02;
  const bool in_time = run.seconds <= 120.0;
  report(2, converged && invariants && in_time,
         "normal mode reaches the target within 200 steps",
         "status=" + s.status + " steps=" + std::to_string(s.steps_executed) +
             " final_offset=" + fmt(s.final_offset) +
             " invariants=" + (invariants ? "ok" : "violated") +
             " time=" + fmt(run.seconds) + "s" +
             (s.diagnostic.empty() ? "" : " diag=" + s.diagnostic));
}

void criterion_3_timing(const TrajectoryLog& standard,
                        const TrajectoryLog& normal) {
  const double ms_std = standard.summary.mean_solve_ms;
  const double ms_nrm = normal.summary.mean_solve_ms;
  const bool ok = ms_std > 0.0 && ms_nrm <= 2.0 * ms_std;
  report(3, ok, "normal-mode solves stay within 2x of standard-mode solves",
         "mean_standard=" + fmt(ms_std) + "ms mean_normal=" + fmt(ms_nrm) +
             "ms ratio=" + fmt(ms_std > 0 ? ms_nrm / ms_std : 0.0));
}

void criterion_4_homeo_suite(const setgeom::NormalSetChart& ns) {
  std::mt19937 rng(20260801u);
  std::uniform_real_distribution<double> da(-kPi, kPi);
  std::uniform_real_distribution<double> dt(0.0, 1.0);

  double worst_rt = 0.0, worst_psi = 0.0, worst_end = 0.0;
  for (int k = 0; k < 1000; ++k) {
    Eigen::VectorXd theta(2);
    theta << da(rng), dt(rng);
    const Eigen::VectorXd v = setgeom::homeo_forward(ns, theta);
    worst_psi = std::min(worst_psi, ns.chart_set().psi(v));
    const Eigen::VectorXd back = setgeom::homeo_inverse(ns, v);
    worst_rt = std::max(worst_rt, (back - theta).lpNorm<Eigen::Infinity>());
  }
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd q(1);
    q << da(rng);
    const setgeom::FiberExtremes fe = setgeom::fiber_extremes(ns, q);
    Eigen::VectorXd lo(2), hi(2);
    lo << q(0), 0.0;
    hi << q(0), 1.0;
    worst_end = std::max(
        worst_end, std::abs(setgeom::homeo_forward(ns, lo)(1) - fe.lo));
    worst_end = std::max(
        worst_end, std::abs(setgeom::homeo_forward(ns, hi)(1) - fe.hi));
  }
  const bool ok = worst_rt <= 1e-8 && worst_psi >= -1e-8 && worst_end <= 1e-8;
  report(4, ok, "straightening map round-trips and stays admissible",
         "max_roundtrip=" + fmt(worst_rt) + " min_psi=" + fmt(worst_psi) +
             " max_endpoint_gap=" + fmt(worst_end));
}

void criterion_5_geometry_oracles(const setgeom::NormalSetChart& ns) {
  // Independent fiber oracle: 1e4-point scan bracketing the outer boundary
  // crossing, then bisection on the raw sign function.
  const setgeom::ImplicitSet& set = ns.chart_set();
  const setgeom::Interval dom = ns.fiber_domain();
  auto brute_hi = [&](double angle) {
    const int n = 10000;
    Eigen::VectorXd v(2);
    v << angle, 0.0;
    const double h = dom.length() / (n - 1);
    int last = -1;
    for (int j = 0; j < n; ++j) {
      v(1) = dom.lo + j * h;
      if (set.psi(v) >= 0.0) last = j;
    }
    if (last < 0) return std::nan("");
    if (last == n - 1) return dom.hi;
    double good = dom.lo + last * h, bad = good + h;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (good + bad);
      v(1) = mid;
      (set.psi(v) >= 0.0 ? good : bad) = mid;
    }
    return good;
  };

  std::mt19937 rng(20260802u);
  std::uniform_real_distribution<double> da(-kPi, kPi);
  double worst_fiber = 0.0;
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd q(1);
    q << da(rng);
    const setgeom::FiberExtremes fe = setgeom::fiber_extremes(ns, q);
    worst_fiber = std::max(worst_fiber, std::abs(fe.hi - brute_hi(q(0))));
    worst_fiber = std::max(worst_fiber, std::abs(fe.lo - dom.lo));
  }

  // Sign agreement between the composed sign function and direct
  // membership in either ellipse, away from a thin boundary band.
  Eigen::Matrix2d P1, P2;
  P1 << 16.0, 0.0, 0.0, 0.5;
  P2 << 5.8551, 7.3707, 7.3707, 10.6449;
  const setgeom::ImplicitSet e1 =
      setgeom::Ellipsoid(Eigen::Vector2d::Zero(), P1).as_implicit();
  const setgeom::ImplicitSet e2 =
      setgeom::Ellipsoid(Eigen::Vector2d::Zero(), P2).as_implicit();
  const setgeom::ImplicitSet& u = ns.cartesian_set();
  int checked = 0, agreed = 0;
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 200; ++j) {
      const double x = -1.3 + 2.6 * i / 199.0;
      const double y = -1.6 + 3.2 * j / 199.0;
      const Eigen::Vector2d pt(x, y);
      const double direct = std::max(e1.psi(pt), e2.psi(pt));
      if (std::abs(direct) < 1e-6) continue;  // boundary band
      ++checked;
      if ((u.psi(pt) >= 0.0) == (direct >= 0.0)) ++agreed;
    }
  }
  const bool ok = worst_fiber <= 1e-6 && checked > 30000 && agreed == checked;
  report(5, ok, "fiber and membership oracles agree with brute force",
         "max_fiber_gap=" + fmt(worst_fiber) + " sign_agreement=" +
             std::to_string(agreed) + "/" + std::to_string(checked));
}

void criterion_6_mode_equivalence(const Scenario& homeo,
                                  const TrajectoryLog& normal_log) {
  const TrajectoryLog homeo_log = harness::run_closed_loop(homeo);
  const size_t n =
      std::min(homeo_log.records.size(), normal_log.records.size());
  double worst = 0.0;
  for (size_t k = 0; k < n; ++k)
    worst = std::max(worst, (homeo_log.records[k].y - normal_log.records[k].y)
                                .lpNorm<Eigen::Infinity>());
  const bool clean = homeo_log.summary.status != "failed" &&
                     normal_log.summary.status != "failed";
  report(6, clean && n > 0 && worst <= 1e-3,
         "homeo and normal closed loops follow the same trajectory",
         "compared_steps=" + std::to_string(n) + " max_output_gap=" +
             fmt(worst) + " homeo_status=" + homeo_log.summary.status +
             " normal_status=" + normal_log.summary.status);
}

void criterion_7_offset_cost(const Scenario& normal) {
  const setgeom::NormalSetChart ns = harness::build_normal_chart(normal);
  const mpct::TrackingMpc mpc = harness::build_controller(normal);
  const plant::PlantModel& model = mpc.model();
  const Eigen::MatrixXd& T = mpc.config().T;

  const std::vector<Eigen::Vector2d> targets = {
      {0.2, 0.3},    // admissible: zero offset cost
      {1.0, -0.8},   // admissible, across the non-convexity
      {2.0, 0.0},    // outside along the thin ellipse axis
      {0.0, 2.0},    // outside along the tall axis
      {-1.5, -1.0},  // outside, third quadrant
  };

  double worst = 0.0;
  std::string detail;
  for (const auto& y_t : targets) {
    const mpct::OffsetOptimum opt = mpct::offset_optimum(ns, y_t, T);
    const Eigen::VectorXd theta_t = mpc.target_theta(y_t);
    const Eigen::VectorXd d = opt.theta - theta_t;
    const double expect = d.dot(T * d);

    mpct::MpcQuery query;
    query.x = plant::steady_state(model, opt.y).first;
    query.y_t = y_t;
    const mpct::MpcResult res = mpc.solve_step(query);
    const double rel =
        std::abs(res.cost - expect) / std::max(1.0, std::abs(expect));
    worst = std::max(worst, rel);
    if (!res.feasible) detail += " infeasible@" + fmt(y_t(0));
  }
  report(7, worst <= 1e-5 && detail.empty(),
         "cost at the offset-optimal equilibrium equals the offset penalty",
         "max_rel_gap=" + fmt(worst) + detail);
}

void criterion_8_convex_baseline(const json& disk_template) {
  std::mt19937 rng(20260803u);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> rad(0.0, 1.0);

  auto run_to = [&](const Eigen::Vector2d& y_t) {
    json j = disk_template;
    j["run"]["y_t"] = {y_t(0), y_t(1)};
    return harness::run_closed_loop(harness::scenario_from_json(j));
  };

  int reached = 0;
  for (int k = 0; k < 20; ++k) {
    const double a = ang(rng);
    const double r = 1.2 * 0.98 * std::sqrt(rad(rng));
    const Eigen::Vector2d y_t(r * std::cos(a), r * std::sin(a));
    const TrajectoryLog log = run_to(y_t);
    if (log.summary.status == "converged" && log.summary.final_offset <= 0.02)
      ++reached;
  }

  // Inadmissible targets settle on the radial projection onto the disk.
  const Scenario disk = harness::scenario_from_json(disk_template);
  const setgeom::NormalSetChart ns = harness::build_normal_chart(disk);
  int projected = 0;
  for (int k = 0; k < 5; ++k) {
    const double a = ang(rng);
    const double r = 1.5 + rad(rng);
    const Eigen::Vector2d y_t(r * std::cos(a), r * std::sin(a));
    const mpct::OffsetOptimum opt =
        mpct::offset_optimum(ns, y_t, disk.mpc.T);
    const TrajectoryLog log = run_to(y_t);
    if (log.records.empty()) continue;
    const Eigen::Vector2d y_final = log.records.back().y;
    if ((y_final - Eigen::Vector2d(opt.y)).norm() <= 0.02 &&
        reference_drift(log, 20) <= 1e-6)
      ++projected;
  }
  report(8, reached == 20 && projected == 5,
         "standard mode solves every tracking task on a convex set",
         "admissible_reached=" + std::to_string(reached) +
             "/20 inadmissible_projected=" + std::to_string(projected) + "/5");
}

void criterion_9_solver_health(const Scenario& normal,
                               const Scenario& standard,
                               const Scenario& homeo) {
  // Derivative consistency of every transcription at random feasible points.
  std::mt19937 rng(20260804u);
  std::uniform_real_distribution<double> du(-0.09, 0.09);
  std::uniform_real_distribution<double> da(-kPi + 0.1, kPi - 0.1);
  std::uniform_real_distribution<double> dt(0.05, 0.95);
  std::uniform_real_distribution<double> dlo(0.0, 0.1);
  std::uniform_real_distribution<double> dhi(0.3, 1.2);
  std::uniform_real_distribution<double> dy(-0.2, 0.2);

  mpct::MpcQuery query;
  query.x = normal.x0;
  query.y_t = normal.y_t;

  double worst = 0.0;
  for (const Scenario* s : {&standard, &homeo, &normal}) {
    const mpct::TrackingMpc mpc = harness::build_controller(*s);
    const nlp::NlpProblem problem = mpc.transcribe(query);
    for (int k = 0; k < 10; ++k) {
      Eigen::VectorXd z = mpc.initial_guess(query);
      for (int i = 0; i < 8; ++i) z(i) = du(rng);
      switch (mpc.mode()) {
        case mpct::Mode::Standard:
          z(8) = dy(rng);
          z(9) = dy(rng);
          break;
        case mpct::Mode::Normal:
          z(8) = da(rng);
          z(9) = dt(rng);
          z(10) = dlo(rng);
          z(11) = dhi(rng);
          break;
        case mpct::Mode::Homeo:
          z(8) = da(rng);
          z(9) = dt(rng);
          break;
      }
      worst = std::max(worst, nlp::check_gradients(problem, z));
    }
  }

  // Merit monotonicity along the accepted iterates of a cold solve.
  Scenario logged = normal;
  logged.mpc.solver.record_history = true;
  const mpct::TrackingMpc mpc = harness::build_controller(logged);
  const nlp::NlpSolution sol = nlp::solve(
      mpc.transcribe(query), mpc.initial_guess(query), logged.mpc.solver);
  bool monotone = true;
  for (const auto& rec : sol.history)
    monotone = monotone && rec.merit_after <= rec.merit_before + 1e-12;

  // Bit-identical repetition (timings excluded).
  json j = normal.echo;
  j["run"]["steps"] = 10;
  const Scenario short_run = harness::scenario_from_json(j);
  const TrajectoryLog a = harness::run_closed_loop(short_run);
  const TrajectoryLog b = harness::run_closed_loop(short_run);
  bool identical = a.records.size() == b.records.size();
  for (size_t k = 0; identical && k < a.records.size(); ++k) {
    identical = a.records[k].x == b.records[k].x &&
                a.records[k].u == b.records[k].u &&
                a.records[k].y_s == b.records[k].y_s &&
                a.records[k].cost == b.records[k].cost;
  }

  report(9, worst <= 1e-4 && monotone && identical,
         "derivatives check out, merit is monotone, runs are repeatable",
         "max_gradient_gap=" + fmt(worst) +
             " merit_monotone=" + (monotone ? "yes" : "no") +
             " bit_identical=" + (identical ? "yes" : "no"));
}

}  // namespace

int main() {
  try {
    const Scenario standard =
        harness::load_scenario("scenarios/ballplate_standard.json");
    const Scenario normal =
        harness::load_scenario("scenarios/ballplate_normal.json");
    const Scenario homeo =
        harness::load_scenario("scenarios/ballplate_homeo.json");
    const json disk_template = load_json("scenarios/disk_standard.json");
    const setgeom::NormalSetChart ns = harness::build_normal_chart(normal);

    const TrajectoryLog standard_log = criterion_1_standard_stalls(standard);
    criterion_2_normal_converges(normal);
    const TrajectoryLog normal_log = harness::run_closed_loop(normal);
    criterion_3_timing(standard_log, normal_log);
    criterion_4_homeo_suite(ns);
    criterion_5_geometry_oracles(ns);
    criterion_6_mode_equivalence(homeo, normal_log);
    criterion_7_offset_cost(normal);
    criterion_8_convex_baseline(disk_template);
    criterion_9_solver_health(normal, standard, homeo);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance harness error: %s\n", e.what());
    return 1;
  }

  std::printf("%d/9 criteria passed\n", 9 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
