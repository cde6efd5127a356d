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
#include <string>
#include <vector>

#include "setgeom/chart.hpp"
#include "setgeom/implicit_set.hpp"

namespace setgeom {

/// The fiber over a basis point contains no members.
struct infeasible_fiber_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// The fiber over a basis point is not a single interval.
struct normality_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// The fiber has (numerically) zero length, so the normalized coordinate
/// is not invertible there.
struct degenerate_fiber_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// The queried point is not a member of the set.
struct outside_set_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// A set viewed in chart coordinates, split into basis coordinates
/// (ranging over a convex box) and one fiber coordinate. For each basis
/// point the member fibers must form a single interval
/// [fiber_lo(q), fiber_hi(q)]; the normalized coordinate
/// t = (v_fiber - lo) / (hi - lo) then straightens the set into
/// basis_region x [0, 1].
class NormalSetChart {
 public:
  NormalSetChart(ImplicitSet cartesian, Chart chart, Box basis_region,
                 std::vector<int> basis_dims = {}, int fiber_dim = -1);

  const ImplicitSet& cartesian_set() const { return cartesian_; }
  const ImplicitSet& chart_set() const { return chart_set_; }
  const Chart& chart() const { return chart_; }
  const Box& basis_region() const { return basis_region_; }
  const std::vector<int>& basis_dims() const { return basis_dims_; }
  int fiber_dim() const { return fiber_dim_; }
  int dim() const { return cartesian_.dim(); }
  Interval fiber_domain() const { return fiber_domain_; }

  bool basis_contains(const Eigen::VectorXd& q, double tol = 0.0) const;
  /// Scatters (q, f) into a full chart-space vector.
  Eigen::VectorXd assemble(const Eigen::VectorXd& q, double fiber) const;
  Eigen::VectorXd basis_of(const Eigen::VectorXd& v) const;

 private:
  ImplicitSet cartesian_;
  Chart chart_;
  ImplicitSet chart_set_;
  Box basis_region_;
  std::vector<int> basis_dims_;
  int fiber_dim_ = -1;
  Interval fiber_domain_;
};

struct FiberExtremes {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

struct FiberOptions {
  int scan_samples = 512;     ///< dense feasibility scan along the fiber
  double bisect_tol = 1e-10;  ///< bracket width for the boundary refinement
};

/// Least and greatest member fiber coordinate over basis point q.
/// Throws infeasible_fiber_error when the fiber is empty and
/// normality_error when it is not a single interval at scan resolution.
FiberExtremes fiber_extremes(const NormalSetChart& ns, const Eigen::VectorXd& q,
                             const FiberOptions& opts = {});

/// theta = (q, t) with t in [0,1]  ->  chart point (q, t*(hi-lo)+lo).
Eigen::VectorXd homeo_forward(const NormalSetChart& ns,
                              const Eigen::VectorXd& theta,
                              const FiberOptions& opts = {});

/// Chart point of a member -> theta. Throws outside_set_error when the
/// point is not a member (beyond a 1e-8 tolerance on psi and on the
/// normalized coordinate).
Eigen::VectorXd homeo_inverse(const NormalSetChart& ns,
                              const Eigen::VectorXd& v,
                              const FiberOptions& opts = {});

/// Same map as homeo_inverse without the membership check; the normalized
/// coordinate may land outside [0,1]. Useful for transforming external
/// targets that need not be admissible.
Eigen::VectorXd homeo_inverse_extended(const NormalSetChart& ns,
                                       const Eigen::VectorXd& v,
                                       const FiberOptions& opts = {});

/// theta with fiber entry t replaced by t*(hi-lo)+lo for the given pair of
/// fiber values; equals homeo_forward when (lo, hi) are the true extremes.
Eigen::VectorXd lambda_map(const NormalSetChart& ns,
                           const Eigen::VectorXd& theta, double lambda_lo,
                           double lambda_hi);

struct NormalityCertificate {
  bool ok = false;
  /// True when every sampled lower extreme sits on the fiber-domain edge
  /// (radial sets seen from an interior center behave like this).
  bool lower_at_domain = false;
  bool upper_at_domain = false;
  /// True when the attachment differs between basis points; such sets are
  /// rejected by the optimizing formulations.
  bool lower_mixed = false;
  bool upper_mixed = false;
  double min_fiber_length = 0.0;
  std::string detail;
};

/// Scans the basis region and certifies that every fiber is a nonempty
/// single interval at the given resolution (relative to fiber length).
NormalityCertificate certify_normality(const NormalSetChart& ns,
                                       int basis_samples = 257,
                                       double fiber_resolution = 1e-4);

}  // namespace setgeom
