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
#include <stdexcept>

namespace setgeom {

/// Raised by the polar chart at its center, where the angle is undefined.
struct undefined_angle_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// Invertible coordinate map between output space and chart space.
/// Identity keeps Cartesian coordinates; polar (2-D only) maps
/// y -> (angle, radius) about a center, with the angle wrapped into
/// [branch_lo, branch_lo + 2*pi).
class Chart {
 public:
  static Chart identity(int dim);
  static Chart polar(const Eigen::Vector2d& center, double branch_lo);

  int dim() const { return dim_; }
  bool is_polar() const { return polar_; }
  const Eigen::Vector2d& center() const { return center_; }
  double branch_lo() const { return branch_lo_; }

  Eigen::VectorXd to_chart(const Eigen::VectorXd& y) const;
  Eigen::VectorXd from_chart(const Eigen::VectorXd& v) const;
  /// d(from_chart)/dv at v; rows index output coordinates.
  Eigen::MatrixXd from_chart_jacobian(const Eigen::VectorXd& v) const;

 private:
  Chart() = default;

  int dim_ = 0;
  bool polar_ = false;
  Eigen::Vector2d center_ = Eigen::Vector2d::Zero();
  double branch_lo_ = 0.0;
};

}  // namespace setgeom
