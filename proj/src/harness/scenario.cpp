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

#include "harness/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace harness {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

const json& require(const json& j, const std::string& key,
                    const std::string& path) {
  if (!j.is_object())
    throw ScenarioError(path.empty() ? "(root)" : path, "must be an object");
  auto it = j.find(key);
  if (it == j.end()) throw ScenarioError(join(path, key), "missing field");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ScenarioError(path, "must be a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ScenarioError(path, "must be an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ScenarioError(path, "must be a string");
  return j.get<std::string>();
}

double opt_number(const json& j, const std::string& key, double fallback,
                  const std::string& path) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as_number(j.at(key), join(path, key));
}

int opt_int(const json& j, const std::string& key, int fallback,
            const std::string& path) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as_int(j.at(key), join(path, key));
}

Eigen::VectorXd as_vector(const json& j, const std::string& path,
                          int expected = -1) {
  if (!j.is_array()) throw ScenarioError(path, "must be an array of numbers");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    v(i) = as_number(j[i], path + "[" + std::to_string(i) + "]");
  if (expected >= 0 && v.size() != expected)
    throw ScenarioError(path, "must have length " + std::to_string(expected));
  return v;
}

// Weight shorthand: scalar -> s*I, length-n array -> diagonal, flat n*n or
// nested n x n array -> full matrix (rows first).
Eigen::MatrixXd as_weight(const json& j, int dim, const std::string& path) {
  if (j.is_number())
    return j.get<double>() * Eigen::MatrixXd::Identity(dim, dim);
  if (!j.is_array())
    throw ScenarioError(path, "must be a number or an array");
  if (!j.empty() && j[0].is_array()) {
    if (static_cast<int>(j.size()) != dim)
      throw ScenarioError(path, "must have " + std::to_string(dim) + " rows");
    Eigen::MatrixXd W(dim, dim);
    for (int r = 0; r < dim; ++r) {
      const auto row = as_vector(j[r], path + "[" + std::to_string(r) + "]",
                                 dim);
      W.row(r) = row.transpose();
    }
    return W;
  }
  if (static_cast<int>(j.size()) == dim) {
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
      W(i, i) = as_number(j[i], path + "[" + std::to_string(i) + "]");
    return W;
  }
  if (static_cast<int>(j.size()) == dim * dim) {
    Eigen::MatrixXd W(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c)
        W(r, c) = as_number(j[r * dim + c],
                            path + "[" + std::to_string(r * dim + c) + "]");
    return W;
  }
  throw ScenarioError(path, "must be scalar, length-" + std::to_string(dim) +
                                " diagonal, or " + std::to_string(dim) + "x" +
                                std::to_string(dim) + " matrix");
}

json weight_echo(const Eigen::MatrixXd& W) {
  json rows = json::array();
  for (int r = 0; r < W.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < W.cols(); ++c) row.push_back(W(r, c));
    rows.push_back(row);
  }
  return rows;
}

json vector_echo(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

void validate_compose(const json& node, int nprims, const std::string& path) {
  if (!node.is_object())
    throw ScenarioError(path, "must be an object ({\"prim\": i} or an op)");
  if (node.contains("prim")) {
    const int i = as_int(node.at("prim"), join(path, "prim"));
    if (i < 0 || i >= nprims)
      throw ScenarioError(join(path, "prim"),
                          "primitive index out of range (have " +
                              std::to_string(nprims) + ")");
    return;
  }
  const std::string op = as_string(require(node, "op", path), join(path, "op"));
  if (op != "union" && op != "intersection")
    throw ScenarioError(join(path, "op"),
                        "must be \"union\" or \"intersection\"");
  const json& args = require(node, "args", path);
  if (!args.is_array() || args.size() < 2)
    throw ScenarioError(join(path, "args"),
                        "must be an array of at least two nodes");
  for (size_t i = 0; i < args.size(); ++i)
    validate_compose(args[i], nprims,
                     join(path, "args[" + std::to_string(i) + "]"));
}

setgeom::ImplicitSet fold_compose(const json& node,
                                  const std::vector<setgeom::ImplicitSet>& prims,
                                  setgeom::RFunction kind) {
  if (node.contains("prim")) return prims[node.at("prim").get<int>()];
  const bool is_union = node.at("op").get<std::string>() == "union";
  const auto& args = node.at("args");
  setgeom::ImplicitSet acc = fold_compose(args[0], prims, kind);
  for (size_t i = 1; i < args.size(); ++i) {
    const setgeom::ImplicitSet next = fold_compose(args[i], prims, kind);
    acc = is_union ? setgeom::r_union(acc, next, kind)
                   : setgeom::r_intersection(acc, next, kind);
  }
  return acc;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  Scenario s;

  // ---- plant -------------------------------------------------------------
  const json& jplant = require(j, "plant", "");
  s.plant_name = as_string(require(jplant, "name", "plant"), "plant.name");
  if (s.plant_name != "ball_on_plate")
    throw ScenarioError("plant.name",
                        "unknown plant \"" + s.plant_name +
                            "\" (supported: ball_on_plate)");
  s.Ts = as_number(require(jplant, "Ts", "plant"), "plant.Ts");
  if (!(s.Ts > 0.0)) throw ScenarioError("plant.Ts", "must be > 0");
  const int n = 8, m = 2, p = 2;

  // ---- output set ----------------------------------------------------------
  const json& jset = require(j, "output_set", "");
  const json& jprims = require(jset, "primitives", "output_set");
  if (!jprims.is_array() || jprims.empty())
    throw ScenarioError("output_set.primitives", "must be a non-empty array");
  for (size_t i = 0; i < jprims.size(); ++i) {
    const std::string path =
        "output_set.primitives[" + std::to_string(i) + "]";
    const json& jp = jprims[i];
    Scenario::Primitive prim;
    prim.kind = as_string(require(jp, "kind", path), join(path, "kind"));
    if (prim.kind != "ellipsoid")
      throw ScenarioError(join(path, "kind"),
                          "unknown primitive kind \"" + prim.kind + "\"");
    prim.center = as_vector(require(jp, "center", path), join(path, "center"),
                            p);
    prim.shape = as_weight(require(jp, "shape", path), p, join(path, "shape"));
    try {
      setgeom::Ellipsoid check(prim.center, prim.shape);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(join(path, "shape"), e.what());
    }
    s.primitives.push_back(std::move(prim));
  }
  if (jset.contains("compose")) {
    s.compose = jset.at("compose");
  } else if (s.primitives.size() == 1) {
    s.compose = json{{"prim", 0}};
  } else {
    json args = json::array();
    for (size_t i = 0; i < s.primitives.size(); ++i)
      args.push_back(json{{"prim", static_cast<int>(i)}});
    s.compose = json{{"op", "union"}, {"args", args}};
  }
  validate_compose(s.compose, static_cast<int>(s.primitives.size()),
                   "output_set.compose");
  const std::string rf =
      jset.contains("rfunction")
          ? as_string(jset.at("rfunction"), "output_set.rfunction")
          : "smooth";
  if (rf == "smooth")
    s.rfunction = setgeom::RFunction::Smooth;
  else if (rf == "exact")
    s.rfunction = setgeom::RFunction::Exact;
  else
    throw ScenarioError("output_set.rfunction",
                        "must be \"smooth\" or \"exact\"");

  // ---- chart ---------------------------------------------------------------
  if (j.contains("chart")) {
    s.has_chart = true;
    const json& jchart = j.at("chart");
    s.chart_kind = as_string(require(jchart, "kind", "chart"), "chart.kind");
    if (s.chart_kind == "polar") {
      const Eigen::VectorXd c =
          as_vector(require(jchart, "center", "chart"), "chart.center", 2);
      s.chart_center = c;
      s.branch_lo = opt_number(jchart, "branch_lo", -M_PI, "chart");
    } else if (s.chart_kind != "identity") {
      throw ScenarioError("chart.kind", "must be \"polar\" or \"identity\"");
    }
    const json& jregion = require(j, "basis_region", "");
    if (!jregion.is_array() || jregion.size() != static_cast<size_t>(p - 1))
      throw ScenarioError("basis_region",
                          "must be an array of " + std::to_string(p - 1) +
                              " [lo, hi] pairs");
    for (size_t i = 0; i < jregion.size(); ++i) {
      const std::string path = "basis_region[" + std::to_string(i) + "]";
      const Eigen::VectorXd iv = as_vector(jregion[i], path, 2);
      if (!(iv(0) <= iv(1))) throw ScenarioError(path, "lo must be <= hi");
      s.basis_region.push_back({iv(0), iv(1)});
    }
  }

  // ---- mpc -----------------------------------------------------------------
  const json& jmpc = require(j, "mpc", "");
  const std::string mode =
      as_string(require(jmpc, "mode", "mpc"), "mpc.mode");
  if (mode == "standard")
    s.mode = mpct::Mode::Standard;
  else if (mode == "homeo")
    s.mode = mpct::Mode::Homeo;
  else if (mode == "normal")
    s.mode = mpct::Mode::Normal;
  else
    throw ScenarioError("mpc.mode",
                        "must be \"standard\", \"homeo\" or \"normal\"");
  if (s.mode != mpct::Mode::Standard && !s.has_chart)
    throw ScenarioError("chart",
                        "missing field (required for mode \"" + mode + "\")");

  s.mpc.Nc = opt_int(jmpc, "Nc", 4, "mpc");
  s.mpc.Np = opt_int(jmpc, "Np", s.mpc.Nc, "mpc");
  if (s.mpc.Nc < 1) throw ScenarioError("mpc.Nc", "must be >= 1");
  if (s.mpc.Nc > s.mpc.Np)
    throw ScenarioError("mpc.Nc", "must not exceed mpc.Np");
  s.mpc.Q = as_weight(require(jmpc, "Q", "mpc"), n, "mpc.Q");
  s.mpc.R = as_weight(require(jmpc, "R", "mpc"), m, "mpc.R");
  s.mpc.T = as_weight(require(jmpc, "T", "mpc"), p, "mpc.T");
  s.mpc.epsilon_lambda = opt_number(jmpc, "epsilon_lambda", 1e-3, "mpc");
  if (!(s.mpc.epsilon_lambda > 0.0))
    throw ScenarioError("mpc.epsilon_lambda", "must be > 0");
  s.mpc.delta_eps = opt_number(jmpc, "delta_eps", 0.0, "mpc");
  if (!(s.mpc.delta_eps >= 0.0))
    throw ScenarioError("mpc.delta_eps", "must be >= 0");

  // ---- solver ----------------------------------------------------------------
  const json jsolver = j.contains("solver") ? j.at("solver") : json::object();
  s.mpc.solver.tol = opt_number(jsolver, "tol", 1e-7, "solver");
  s.mpc.solver.feas_tol = opt_number(jsolver, "feas_tol", 1e-8, "solver");
  s.mpc.solver.max_iter = opt_int(jsolver, "max_iter", 100, "solver");
  s.mpc.solver.mu_init = opt_number(jsolver, "mu_init", 10.0, "solver");
  s.mpc.solver.mu_max = opt_number(jsolver, "mu_max", 1e10, "solver");
  if (s.mpc.solver.max_iter < 1)
    throw ScenarioError("solver.max_iter", "must be >= 1");
  s.mpc.fiber.scan_samples =
      opt_int(jsolver, "fiber_scan_samples", 512, "solver");
  s.mpc.fiber.bisect_tol =
      opt_number(jsolver, "fiber_bisect_tol", 1e-12, "solver");

  // ---- run -----------------------------------------------------------------
  const json& jrun = require(j, "run", "");
  Eigen::VectorXd x0 = as_vector(require(jrun, "x0", "run"), "run.x0");
  if (x0.size() == 4) {
    // Ball position/velocity block; plate starts level and at rest.
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
    full.head(4) = x0;
    s.x0 = full;
  } else if (x0.size() == n) {
    s.x0 = x0;
  } else {
    throw ScenarioError("run.x0",
                        "must have length 4 (ball block) or " +
                            std::to_string(n) + " (full state)");
  }
  s.y_t = as_vector(require(jrun, "y_t", "run"), "run.y_t", p);
  s.steps = opt_int(jrun, "steps", 200, "run");
  if (s.steps < 0) throw ScenarioError("run.steps", "must be >= 0");
  s.stop_tol = opt_number(jrun, "stop_tol", 0.02, "run");
  s.stop_hold = opt_int(jrun, "stop_hold", 10, "run");
  if (s.stop_hold < 1) throw ScenarioError("run.stop_hold", "must be >= 1");

  // ---- echo with defaults filled in -----------------------------------------
  json echo;
  echo["plant"] = {{"name", s.plant_name}, {"Ts", s.Ts}};
  json prims = json::array();
  for (const auto& prim : s.primitives)
    prims.push_back(json{{"kind", prim.kind},
                         {"center", vector_echo(prim.center)},
                         {"shape", weight_echo(prim.shape)}});
  echo["output_set"] = {{"primitives", prims},
                        {"compose", s.compose},
                        {"rfunction", rf}};
  if (s.has_chart) {
    json jc = {{"kind", s.chart_kind}};
    if (s.chart_kind == "polar") {
      jc["center"] = vector_echo(s.chart_center);
      jc["branch_lo"] = s.branch_lo;
    }
    echo["chart"] = jc;
    json region = json::array();
    for (const auto& iv : s.basis_region)
      region.push_back(json::array({iv.lo, iv.hi}));
    echo["basis_region"] = region;
  }
  echo["mpc"] = {{"mode", mode},
                 {"Nc", s.mpc.Nc},
                 {"Np", s.mpc.Np},
                 {"Q", weight_echo(s.mpc.Q)},
                 {"R", weight_echo(s.mpc.R)},
                 {"T", weight_echo(s.mpc.T)},
                 {"epsilon_lambda", s.mpc.epsilon_lambda},
                 {"delta_eps", s.mpc.delta_eps}};
  echo["solver"] = {{"tol", s.mpc.solver.tol},
                    {"feas_tol", s.mpc.solver.feas_tol},
                    {"max_iter", s.mpc.solver.max_iter},
                    {"mu_init", s.mpc.solver.mu_init},
                    {"mu_max", s.mpc.solver.mu_max},
                    {"fiber_scan_samples", s.mpc.fiber.scan_samples},
                    {"fiber_bisect_tol", s.mpc.fiber.bisect_tol}};
  echo["run"] = {{"x0", vector_echo(s.x0)},
                 {"y_t", vector_echo(s.y_t)},
                 {"steps", s.steps},
                 {"stop_tol", s.stop_tol},
                 {"stop_hold", s.stop_hold}};
  s.echo = std::move(echo);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("(file)", "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ScenarioError("(file)", std::string("JSON parse error: ") + e.what());
  }
  return scenario_from_json(j);
}

setgeom::ImplicitSet build_output_set(const Scenario& s) {
  std::vector<setgeom::ImplicitSet> prims;
  prims.reserve(s.primitives.size());
  for (const auto& prim : s.primitives)
    prims.push_back(setgeom::Ellipsoid(prim.center, prim.shape).as_implicit());
  return fold_compose(s.compose, prims, s.rfunction);
}

setgeom::Chart build_chart(const Scenario& s) {
  if (!s.has_chart)
    throw ScenarioError("chart", "missing field (required for this mode)");
  if (s.chart_kind == "polar")
    return setgeom::Chart::polar(s.chart_center, s.branch_lo);
  return setgeom::Chart::identity(2);
}

setgeom::NormalSetChart build_normal_chart(const Scenario& s) {
  return setgeom::NormalSetChart(build_output_set(s), build_chart(s),
                                 s.basis_region);
}

plant::PlantModel build_plant(const Scenario& s) {
  return plant::ball_on_plate(s.Ts, build_output_set(s));
}

mpct::TrackingMpc build_controller(const Scenario& s) {
  try {
    if (s.mode == mpct::Mode::Standard)
      return mpct::TrackingMpc::build_standard(build_plant(s), s.mpc);
    const setgeom::NormalSetChart ns = build_normal_chart(s);
    const setgeom::NormalityCertificate cert = setgeom::certify_normality(ns);
    if (s.mode == mpct::Mode::Normal)
      return mpct::TrackingMpc::build_normal(build_plant(s), ns, s.mpc, cert);
    return mpct::TrackingMpc::build_homeo(build_plant(s), ns, s.mpc, cert);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("mpc", e.what());
  }
}

void set_mode(Scenario& s, mpct::Mode mode) {
  if (mode != mpct::Mode::Standard && !s.has_chart)
    throw ScenarioError("chart", "missing field (required for mode \"" +
                                     mpct::to_string(mode) + "\")");
  s.mode = mode;
  s.echo["mpc"]["mode"] = mpct::to_string(mode);
}

}  // namespace harness
