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
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace setgeom {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Axis-aligned box, one interval per coordinate.
using Box = std::vector<Interval>;

using PsiFn = std::function<double(const Eigen::VectorXd&)>;
using PsiGradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// How set-boolean compositions are realized. Smooth uses the Rvachev R0
/// system (differentiable away from the joint zero locus), Exact uses
/// min/max (not differentiable, rejected by the smooth NLP solver).
enum class RFunction { Smooth, Exact };

/// Region described by a sign function: y is a member iff psi(y) >= 0,
/// on the boundary iff psi(y) == 0.
class ImplicitSet {
 public:
  ImplicitSet() = default;
  ImplicitSet(int dim, Box bbox, PsiFn psi, PsiGradFn grad = nullptr,
              bool smooth = true);

  int dim() const { return dim_; }
  const Box& bbox() const { return bbox_; }
  bool smooth() const { return smooth_; }
  bool has_analytic_grad() const { return static_cast<bool>(grad_); }

  double psi(const Eigen::VectorXd& y) const;
  /// Analytic gradient when available, central finite differences otherwise.
  Eigen::VectorXd psi_grad(const Eigen::VectorXd& y) const;
  bool contains(const Eigen::VectorXd& y) const { return psi(y) >= 0.0; }

 private:
  void check_dim(const Eigen::VectorXd& y) const;

  int dim_ = 0;
  Box bbox_;
  PsiFn psi_;
  PsiGradFn grad_;
  bool smooth_ = true;
};

/// {y : (y-c)' P (y-c) <= 1} with P symmetric positive definite.
struct Ellipsoid {
  Eigen::VectorXd center;
  Eigen::MatrixXd shape;

  Ellipsoid(Eigen::VectorXd center_, Eigen::MatrixXd shape_);
  /// psi(y) = 1 - (y-c)' P (y-c); bbox half-widths are sqrt(diag(P^-1)).
  ImplicitSet as_implicit() const;
};

ImplicitSet r_union(const ImplicitSet& a, const ImplicitSet& b,
                    RFunction kind = RFunction::Smooth);
ImplicitSet r_intersection(const ImplicitSet& a, const ImplicitSet& b,
                           RFunction kind = RFunction::Smooth);

struct ProbeReport {
  bool ok = true;
  std::string detail;
};

/// Samples 1-D probe lines through the bbox and verifies that every sign
/// flip of psi bisects down to a near-zero crossing (continuity evidence).
ProbeReport check_continuity(const ImplicitSet& set, int probes = 32,
                             double spacing = 1e-4, double tol = 1e-6,
                             unsigned seed = 20260814u);

/// Samples an inflated bbox and verifies no member falls outside bbox.
ProbeReport check_bbox_containment(const ImplicitSet& set, int samples = 20000,
                                   unsigned seed = 20260815u);

/// Sampled Lipschitz estimate of psi over the bbox (used to derive the
/// interior margin delta from a ball radius epsilon).
double estimate_lipschitz(const ImplicitSet& set, int samples = 20000,
                          unsigned seed = 20260816u);

}  // namespace setgeom
