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

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "harness/emit.hpp"
#include "harness/scenario.hpp"
#include "harness/simulate.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::string stem_of(const std::string& path) {
  return fs::path(path).stem().string();
}

mpct::Mode parse_mode(const std::string& mode) {
  if (mode == "standard") return mpct::Mode::Standard;
  if (mode == "homeo") return mpct::Mode::Homeo;
  if (mode == "normal") return mpct::Mode::Normal;
  throw harness::ScenarioError("mpc.mode", "unknown mode \"" + mode + "\"");
}

void print_summary(const harness::RunSummary& s) {
  std::printf("status=%s steps=%d final_offset=%.6g mean_solve_ms=%.4f "
              "std_solve_ms=%.4f\n",
              s.status.c_str(), s.steps_executed, s.final_offset,
              s.mean_solve_ms, s.std_solve_ms);
  if (!s.diagnostic.empty()) std::printf("diagnostic: %s\n", s.diagnostic.c_str());
}

int run_simulate(const std::string& scenario_path, const std::string& mode,
                 int steps, const std::string& out_dir,
                 const std::string& format) {
  harness::Scenario s;
  try {
    s = harness::load_scenario(scenario_path);
    if (!mode.empty()) harness::set_mode(s, parse_mode(mode));
    if (steps >= 0) {
      s.steps = steps;
      s.echo["run"]["steps"] = steps;
    }
  } catch (const harness::ScenarioError& e) {
    std::fprintf(stderr, "scenario error: %s\n", e.what());
    return kExitValidation;
  }

  harness::TrajectoryLog log;
  try {
    log = harness::run_closed_loop(s);
  } catch (const harness::ScenarioError& e) {
    std::fprintf(stderr, "scenario error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "run failed: %s\n", e.what());
    return kExitRuntime;
  }

  try {
    fs::create_directories(out_dir);
    const std::string base = (fs::path(out_dir) / stem_of(scenario_path)).string();
    if (format == "csv" || format == "both") {
      harness::emit_csv(log, base + ".csv");
      std::printf("wrote %s.csv\n", base.c_str());
    }
    if (format == "json" || format == "both") {
      harness::emit_json(log, base + ".json");
      std::printf("wrote %s.json\n", base.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "emit failed: %s\n", e.what());
    return kExitRuntime;
  }

  print_summary(log.summary);
  return log.summary.status == "failed" ? kExitRuntime : kExitOk;
}

int run_benchmark(const std::string& path_a, const std::string& path_b,
                  const std::string& out_path) {
  harness::Scenario a, b;
  try {
    a = harness::load_scenario(path_a);
    b = harness::load_scenario(path_b);
  } catch (const harness::ScenarioError& e) {
    std::fprintf(stderr, "scenario error: %s\n", e.what());
    return kExitValidation;
  }

  harness::BenchmarkReport rep;
  try {
    rep = harness::benchmark(a, b);
  } catch (const harness::ScenarioError& e) {
    std::fprintf(stderr, "benchmark error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "benchmark failed: %s\n", e.what());
    return kExitRuntime;
  }

  std::printf("%-10s mean_solve_ms=%.4f std_solve_ms=%.4f (status=%s)\n",
              rep.mode_a.c_str(), rep.mean_a_ms, rep.std_a_ms,
              rep.summary_a.status.c_str());
  std::printf("%-10s mean_solve_ms=%.4f std_solve_ms=%.4f (status=%s)\n",
              rep.mode_b.c_str(), rep.mean_b_ms, rep.std_b_ms,
              rep.summary_b.status.c_str());
  std::printf("ratio(%s/%s)=%.3f\n", rep.mode_a.c_str(), rep.mode_b.c_str(),
              rep.ratio);

  if (!out_path.empty()) {
    nlohmann::json doc = {
        {"mode_a", rep.mode_a},       {"mode_b", rep.mode_b},
        {"mean_a_ms", rep.mean_a_ms}, {"std_a_ms", rep.std_a_ms},
        {"mean_b_ms", rep.mean_b_ms}, {"std_b_ms", rep.std_b_ms},
        {"ratio", rep.ratio},
        {"status_a", rep.summary_a.status},
        {"status_b", rep.summary_b.status}};
    std::ofstream out(out_path);
    if (!out) {
      std::fprintf(stderr, "cannot write %s\n", out_path.c_str());
      return kExitRuntime;
    }
    out << doc.dump(2) << "\n";
    std::printf("wrote %s\n", out_path.c_str());
  }
  const bool failed = rep.summary_a.status == "failed" ||
                      rep.summary_b.status == "failed";
  return failed ? kExitRuntime : kExitOk;
}

int run_validate(const std::string& scenario_path) {
  try {
    const harness::Scenario s = harness::load_scenario(scenario_path);
    build_output_set(s);
    if (s.mode != mpct::Mode::Standard) {
      const setgeom::NormalSetChart ns = harness::build_normal_chart(s);
      const setgeom::NormalityCertificate cert =
          setgeom::certify_normality(ns);
      if (!cert.ok) {
        std::fprintf(stderr, "validation failed: %s\n", cert.detail.c_str());
        return kExitValidation;
      }
      std::printf("fiber check passed (min fiber length %.6g)\n",
                  cert.min_fiber_length);
    }
    std::printf("scenario ok: plant=%s mode=%s steps=%d\n",
                s.plant_name.c_str(), mpct::to_string(s.mode).c_str(),
                s.steps);
    return kExitOk;
  } catch (const harness::ScenarioError& e) {
    std::fprintf(stderr, "validation failed: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "validation failed: %s\n", e.what());
    return kExitValidation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Receding-horizon tracking over non-convex output sets"};
  app.require_subcommand(1);

  std::string scenario_path, mode, out_dir = ".", format = "csv";
  int steps = -1;
  auto* sim = app.add_subcommand("simulate", "run a closed-loop scenario");
  sim->add_option("--scenario", scenario_path, "scenario JSON file")
      ->required();
  sim->add_option("--mode", mode,
                  "override mpc.mode (standard|homeo|normal)");
  sim->add_option("--steps", steps, "override run.steps");
  sim->add_option("--out", out_dir, "output directory (default .)");
  sim->add_option("--format", format, "csv|json|both (default csv)")
      ->check(CLI::IsMember({"csv", "json", "both"}));

  std::string path_a, path_b, bench_out;
  auto* bench = app.add_subcommand(
      "benchmark", "time two scenarios differing only in mpc.mode");
  bench->add_option("--scenario-a", path_a, "first scenario")->required();
  bench->add_option("--scenario-b", path_b, "second scenario")->required();
  bench->add_option("--out", bench_out, "write the report as JSON");

  std::string val_path;
  auto* val = app.add_subcommand("validate",
                                 "check a scenario without running it");
  val->add_option("--scenario", val_path, "scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) return run_simulate(scenario_path, mode, steps, out_dir, format);
  if (bench->parsed()) return run_benchmark(path_a, path_b, bench_out);
  return run_validate(val_path);
}
