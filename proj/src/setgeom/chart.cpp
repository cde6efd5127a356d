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

#include "setgeom/chart.hpp"

#include <cmath>

namespace setgeom {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

void check_size(const Eigen::VectorXd& v, int dim, const char* what) {
  if (v.size() != dim)
    throw std::invalid_argument(std::string("Chart: ") + what +
                                " has wrong dimension");
}
}  // namespace

Chart Chart::identity(int dim) {
  if (dim <= 0) throw std::invalid_argument("Chart: dim must be >= 1");
  Chart c;
  c.dim_ = dim;
  c.polar_ = false;
  return c;
}

Chart Chart::polar(const Eigen::Vector2d& center, double branch_lo) {
  Chart c;
  c.dim_ = 2;
  c.polar_ = true;
  c.center_ = center;
  c.branch_lo_ = branch_lo;
  return c;
}

Eigen::VectorXd Chart::to_chart(const Eigen::VectorXd& y) const {
  check_size(y, dim_, "point");
  if (!polar_) return y;
  const double dx = y(0) - center_(0);
  const double dy = y(1) - center_(1);
  const double r = std::hypot(dx, dy);
  if (r < 1e-15)
    throw undefined_angle_error("polar chart: angle undefined at the center");
  double a = std::atan2(dy, dx);
  a -= kTwoPi * std::floor((a - branch_lo_) / kTwoPi);
  if (a >= branch_lo_ + kTwoPi) a -= kTwoPi;  // guard fp rounding at the seam
  if (a < branch_lo_) a = branch_lo_;
  Eigen::VectorXd v(2);
  v << a, r;
  return v;
}

Eigen::VectorXd Chart::from_chart(const Eigen::VectorXd& v) const {
  check_size(v, dim_, "chart point");
  if (!polar_) return v;
  Eigen::VectorXd y(2);
  y << center_(0) + v(1) * std::cos(v(0)), center_(1) + v(1) * std::sin(v(0));
  return y;
}

Eigen::MatrixXd Chart::from_chart_jacobian(const Eigen::VectorXd& v) const {
  check_size(v, dim_, "chart point");
  if (!polar_) return Eigen::MatrixXd::Identity(dim_, dim_);
  const double a = v(0), r = v(1);
  Eigen::MatrixXd J(2, 2);
  J << -r * std::sin(a), std::cos(a),  //
      r * std::cos(a), std::sin(a);
  return J;
}

}  // namespace setgeom
