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

#include "harness/emit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace harness {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json num_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double null_to_nan(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(num_or_null(v(i)));
  return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
  Eigen::VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v(i) = null_to_nan(a[i]);
  return v;
}

}  // namespace

std::string csv_header(int n, int m, int p) {
  std::ostringstream os;
  os << "k";
  for (int i = 1; i <= n; ++i) os << ",x" << i;
  for (int i = 1; i <= m; ++i) os << ",u" << i;
  for (int i = 1; i <= p; ++i) os << ",y" << i;
  for (int i = 1; i <= p; ++i) os << ",ys" << i;
  for (int i = 1; i <= p; ++i) os << ",theta" << i;
  os << ",lambda_lo,lambda_hi,cost,kkt,solve_time_ms";
  return os.str();
}

void emit_csv(const TrajectoryLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("emit_csv: cannot open " + path + " for writing");
  int n = 0, m = 0, p = 0;
  if (!log.records.empty()) {
    n = static_cast<int>(log.records.front().x.size());
    m = static_cast<int>(log.records.front().u.size());
    p = static_cast<int>(log.records.front().y.size());
  } else if (log.scenario_echo.contains("run")) {
    n = static_cast<int>(log.scenario_echo["run"]["x0"].size());
    m = 2;
    p = static_cast<int>(log.scenario_echo["run"]["y_t"].size());
  }
  out << csv_header(n, m, p) << "\n";
  for (const auto& r : log.records) {
    out << r.k;
    for (int i = 0; i < n; ++i) out << "," << fmt(r.x(i));
    for (int i = 0; i < m; ++i) out << "," << fmt(r.u(i));
    for (int i = 0; i < p; ++i) out << "," << fmt(r.y(i));
    for (int i = 0; i < p; ++i) out << "," << fmt(r.y_s(i));
    for (int i = 0; i < p; ++i) out << "," << fmt(r.theta(i));
    out << "," << fmt(r.lambda_lo) << "," << fmt(r.lambda_hi) << ","
        << fmt(r.cost) << "," << fmt(r.kkt) << "," << fmt(r.solve_time_ms)
        << "\n";
  }
  if (!out) throw std::runtime_error("emit_csv: write to " + path + " failed");
}

void emit_json(const TrajectoryLog& log, const std::string& path) {
  json steps = json::array();
  for (const auto& r : log.records) {
    steps.push_back(json{{"k", r.k},
                         {"x", vec_to_json(r.x)},
                         {"u", vec_to_json(r.u)},
                         {"y", vec_to_json(r.y)},
                         {"y_s", vec_to_json(r.y_s)},
                         {"theta", vec_to_json(r.theta)},
                         {"lambda_lo", num_or_null(r.lambda_lo)},
                         {"lambda_hi", num_or_null(r.lambda_hi)},
                         {"cost", num_or_null(r.cost)},
                         {"kkt", num_or_null(r.kkt)},
                         {"solve_time_ms", num_or_null(r.solve_time_ms)}});
  }
  json doc;
  doc["scenario"] = log.scenario_echo;
  doc["summary"] = {{"status", log.summary.status},
                    {"steps_executed", log.summary.steps_executed},
                    {"final_offset", num_or_null(log.summary.final_offset)},
                    {"mean_solve_ms", num_or_null(log.summary.mean_solve_ms)},
                    {"std_solve_ms", num_or_null(log.summary.std_solve_ms)},
                    {"diagnostic", log.summary.diagnostic}};
  doc["steps"] = std::move(steps);

  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("emit_json: cannot open " + path +
                             " for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("emit_json: write to " + path + " failed");
}

TrajectoryLog load_log_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_log_json: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("load_log_json: parse error: ") +
                             e.what());
  }
  TrajectoryLog log;
  log.scenario_echo = doc.at("scenario");
  const json& s = doc.at("summary");
  log.summary.status = s.at("status").get<std::string>();
  log.summary.steps_executed = s.at("steps_executed").get<int>();
  log.summary.final_offset = null_to_nan(s.at("final_offset"));
  log.summary.mean_solve_ms = null_to_nan(s.at("mean_solve_ms"));
  log.summary.std_solve_ms = null_to_nan(s.at("std_solve_ms"));
  log.summary.diagnostic = s.at("diagnostic").get<std::string>();
  for (const auto& r : doc.at("steps")) {
    StepRecord rec;
    rec.k = r.at("k").get<int>();
    rec.x = vec_from_json(r.at("x"));
    rec.u = vec_from_json(r.at("u"));
    rec.y = vec_from_json(r.at("y"));
    rec.y_s = vec_from_json(r.at("y_s"));
    rec.theta = vec_from_json(r.at("theta"));
    rec.lambda_lo = null_to_nan(r.at("lambda_lo"));
    rec.lambda_hi = null_to_nan(r.at("lambda_hi"));
    rec.cost = null_to_nan(r.at("cost"));
    rec.kkt = null_to_nan(r.at("kkt"));
    rec.solve_time_ms = null_to_nan(r.at("solve_time_ms"));
    log.records.push_back(std::move(rec));
  }
  return log;
}

}  // namespace harness
