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

#include "setgeom/normal_set.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace setgeom {

namespace {

Box chart_space_bbox(const ImplicitSet& cart, const Chart& chart) {
  if (!chart.is_polar()) return cart.bbox();
  // Polar chart: angle spans one branch period, radius reaches the
  // farthest bbox corner.
  const Box& bb = cart.bbox();
  double rmax = 0.0;
  for (int cx = 0; cx < 2; ++cx)
    for (int cy = 0; cy < 2; ++cy) {
      const double dx = (cx ? bb[0].hi : bb[0].lo) - chart.center()(0);
      const double dy = (cy ? bb[1].hi : bb[1].lo) - chart.center()(1);
      rmax = std::max(rmax, std::hypot(dx, dy));
    }
  return {{chart.branch_lo(), chart.branch_lo() + 2.0 * M_PI}, {0.0, rmax}};
}

}  // namespace

NormalSetChart::NormalSetChart(ImplicitSet cartesian, Chart chart,
                               Box basis_region, std::vector<int> basis_dims,
                               int fiber_dim)
    : cartesian_(std::move(cartesian)),
      chart_(chart),
      basis_region_(std::move(basis_region)) {
  const int p = cartesian_.dim();
  if (chart_.dim() != p)
    throw std::invalid_argument("NormalSetChart: chart dimension mismatch");
  if (p < 2)
    throw std::invalid_argument("NormalSetChart: needs at least 2 dimensions");

  if (basis_dims.empty() && fiber_dim < 0) {
    basis_dims.resize(p - 1);
    std::iota(basis_dims.begin(), basis_dims.end(), 0);
    fiber_dim = p - 1;
  }
  if (fiber_dim < 0 || fiber_dim >= p ||
      static_cast<int>(basis_dims.size()) != p - 1)
    throw std::invalid_argument("NormalSetChart: bad basis/fiber split");
  std::vector<char> seen(p, 0);
  for (int d : basis_dims) {
    if (d < 0 || d >= p || seen[d])
      throw std::invalid_argument("NormalSetChart: bad basis dims");
    seen[d] = 1;
  }
  if (seen[fiber_dim])
    throw std::invalid_argument("NormalSetChart: fiber dim overlaps basis");
  basis_dims_ = std::move(basis_dims);
  fiber_dim_ = fiber_dim;

  if (static_cast<int>(basis_region_.size()) != p - 1)
    throw std::invalid_argument("NormalSetChart: basis_region size mismatch");
  for (const auto& iv : basis_region_)
    if (!(iv.lo <= iv.hi))
      throw std::invalid_argument("NormalSetChart: basis_region lo > hi");

  const Box cb = chart_space_bbox(cartesian_, chart_);
  fiber_domain_ = cb[fiber_dim_];
  if (!(fiber_domain_.length() > 0.0))
    throw std::invalid_argument("NormalSetChart: empty fiber domain");

  const ImplicitSet cart = cartesian_;
  const Chart ch = chart_;
  PsiFn psi = [cart, ch](const Eigen::VectorXd& v) {
    return cart.psi(ch.from_chart(v));
  };
  PsiGradFn grad;
  if (cartesian_.has_analytic_grad()) {
    grad = [cart, ch](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      return ch.from_chart_jacobian(v).transpose() *
             cart.psi_grad(ch.from_chart(v));
    };
  }
  chart_set_ = ImplicitSet(p, cb, std::move(psi), std::move(grad),
                           cartesian_.smooth());
}

bool NormalSetChart::basis_contains(const Eigen::VectorXd& q,
                                    double tol) const {
  if (q.size() != static_cast<int>(basis_region_.size())) return false;
  for (int i = 0; i < q.size(); ++i)
    if (q(i) < basis_region_[i].lo - tol || q(i) > basis_region_[i].hi + tol)
      return false;
  return true;
}

Eigen::VectorXd NormalSetChart::assemble(const Eigen::VectorXd& q,
                                         double fiber) const {
  if (q.size() != static_cast<int>(basis_dims_.size()))
    throw std::invalid_argument("NormalSetChart: basis point has wrong size");
  Eigen::VectorXd v(dim());
  for (size_t i = 0; i < basis_dims_.size(); ++i) v(basis_dims_[i]) = q(i);
  v(fiber_dim_) = fiber;
  return v;
}

Eigen::VectorXd NormalSetChart::basis_of(const Eigen::VectorXd& v) const {
  if (v.size() != dim())
    throw std::invalid_argument("NormalSetChart: chart point has wrong size");
  Eigen::VectorXd q(basis_dims_.size());
  for (size_t i = 0; i < basis_dims_.size(); ++i) q(i) = v(basis_dims_[i]);
  return q;
}

namespace {

// Shrinks the bracket [bad, good] on the feasibility predicate and returns
// the feasible end.
double refine_boundary(const std::function<bool(double)>& feasible, double bad,
                       double good, double tol) {
  while (std::abs(good - bad) > tol) {
    const double mid = 0.5 * (good + bad);
    if (mid == good || mid == bad) break;
    if (feasible(mid))
      good = mid;
    else
      bad = mid;
  }
  return good;
}

}  // namespace

FiberExtremes fiber_extremes(const NormalSetChart& ns, const Eigen::VectorXd& q,
                             const FiberOptions& opts) {
  if (!ns.basis_contains(q, 1e-12)) {
    std::ostringstream os;
    os << "fiber_extremes: basis point [" << q.transpose()
       << "] outside basis region";
    throw std::invalid_argument(os.str());
  }
  const Interval dom = ns.fiber_domain();
  const int n = std::max(opts.scan_samples, 8);
  const double h = dom.length() / (n - 1);

  const auto& chart_set = ns.chart_set();
  auto feasible = [&](double f) {
    return chart_set.psi(ns.assemble(q, f)) >= 0.0;
  };

  int first = -1, last = -1, runs = 0;
  bool prev = false;
  for (int i = 0; i < n; ++i) {
    const bool cur = feasible(dom.lo + i * h);
    if (cur && !prev) {
      ++runs;
      if (first < 0) first = i;
    }
    if (cur) last = i;
    prev = cur;
  }
  if (runs == 0) {
    std::ostringstream os;
    os << "empty fiber over basis point [" << q.transpose() << "]";
    throw infeasible_fiber_error(os.str());
  }
  if (runs > 1) {
    std::ostringstream os;
    os << "fiber over basis point [" << q.transpose() << "] splits into "
       << runs << " intervals at scan resolution";
    throw normality_error(os.str());
  }

  FiberExtremes out;
  out.lo = (first == 0)
               ? dom.lo
               : refine_boundary(feasible, dom.lo + (first - 1) * h,
                                 dom.lo + first * h, opts.bisect_tol);
  out.hi = (last == n - 1)
               ? dom.hi
               : refine_boundary(feasible, dom.lo + (last + 1) * h,
                                 dom.lo + last * h, opts.bisect_tol);
  return out;
}

Eigen::VectorXd homeo_forward(const NormalSetChart& ns,
                              const Eigen::VectorXd& theta,
                              const FiberOptions& opts) {
  if (theta.size() != ns.dim())
    throw std::invalid_argument("homeo_forward: theta has wrong size");
  const double t = theta(ns.fiber_dim());
  if (t < -1e-12 || t > 1.0 + 1e-12)
    throw std::invalid_argument(
        "homeo_forward: normalized coordinate outside [0,1]");
  const Eigen::VectorXd q = ns.basis_of(theta);
  const FiberExtremes ex = fiber_extremes(ns, q, opts);
  Eigen::VectorXd v = theta;
  v(ns.fiber_dim()) = std::clamp(t, 0.0, 1.0) * ex.length() + ex.lo;
  return v;
}

namespace {

Eigen::VectorXd inverse_impl(const NormalSetChart& ns, const Eigen::VectorXd& v,
                             const FiberOptions& opts, bool strict) {
  if (v.size() != ns.dim())
    throw std::invalid_argument("homeo_inverse: point has wrong size");
  const Eigen::VectorXd q = ns.basis_of(v);
  if (strict && !ns.basis_contains(q, 1e-12))
    throw outside_set_error("homeo_inverse: basis part outside basis region");
  if (strict && ns.chart_set().psi(v) < -1e-8)
    throw outside_set_error("homeo_inverse: point is not a member");
  const FiberExtremes ex = fiber_extremes(ns, q, opts);
  const double len = ex.length();
  if (len < 1e-12)
    throw degenerate_fiber_error(
        "homeo_inverse: fiber has zero length, map not invertible here");
  double t = (v(ns.fiber_dim()) - ex.lo) / len;
  if (strict) {
    // Members sit inside the fiber interval up to refinement tolerance.
    if (t < -1e-8 / len || t > 1.0 + 1e-8 / len) {
      const double slack = 10.0 * std::max(opts.bisect_tol, 1e-12) / len;
      if (t < -slack || t > 1.0 + slack)
        throw outside_set_error(
            "homeo_inverse: fiber coordinate outside the member interval");
    }
    t = std::clamp(t, 0.0, 1.0);
  }
  Eigen::VectorXd theta = v;
  theta(ns.fiber_dim()) = t;
  return theta;
}

}  // namespace

Eigen::VectorXd homeo_inverse(const NormalSetChart& ns,
                              const Eigen::VectorXd& v,
                              const FiberOptions& opts) {
  return inverse_impl(ns, v, opts, true);
}

Eigen::VectorXd homeo_inverse_extended(const NormalSetChart& ns,
                                       const Eigen::VectorXd& v,
                                       const FiberOptions& opts) {
  return inverse_impl(ns, v, opts, false);
}

Eigen::VectorXd lambda_map(const NormalSetChart& ns,
                           const Eigen::VectorXd& theta, double lambda_lo,
                           double lambda_hi) {
  if (theta.size() != ns.dim())
    throw std::invalid_argument("lambda_map: theta has wrong size");
  Eigen::VectorXd v = theta;
  v(ns.fiber_dim()) =
      theta(ns.fiber_dim()) * (lambda_hi - lambda_lo) + lambda_lo;
  return v;
}

NormalityCertificate certify_normality(const NormalSetChart& ns,
                                       int basis_samples,
                                       double fiber_resolution) {
  NormalityCertificate cert;
  cert.min_fiber_length = std::numeric_limits<double>::infinity();
  const Interval dom = ns.fiber_domain();
  const int fiber_n =
      std::max(16, static_cast<int>(std::ceil(1.0 / fiber_resolution)) + 1);
  const double h = dom.length() / (fiber_n - 1);

  const auto& region = ns.basis_region();
  const int bd = static_cast<int>(region.size());

  // Deterministic basis sweep: a grid for 1-D bases, a low-discrepancy
  // lattice otherwise.
  std::vector<Eigen::VectorXd> points;
  points.reserve(basis_samples);
  if (bd == 1) {
    for (int i = 0; i < basis_samples; ++i) {
      Eigen::VectorXd q(1);
      q(0) = region[0].lo +
             region[0].length() * (basis_samples == 1
                                       ? 0.5
                                       : double(i) / (basis_samples - 1));
      points.push_back(q);
    }
  } else {
    // Kronecker sequence with square-root-of-prime increments.
    static const double primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    for (int i = 0; i < basis_samples; ++i) {
      Eigen::VectorXd q(bd);
      for (int k = 0; k < bd; ++k) {
        const double a = std::sqrt(primes[k % 10]);
        const double u = std::fmod(0.5 + (i + 1) * (a - std::floor(a)), 1.0);
        q(k) = region[k].lo + u * region[k].length();
      }
      points.push_back(q);
    }
  }

  int lower_domain = 0, upper_domain = 0;
  for (const auto& q : points) {
    int first = -1, last = -1, runs = 0;
    bool prev = false;
    for (int i = 0; i < fiber_n; ++i) {
      const bool cur = ns.chart_set().psi(ns.assemble(q, dom.lo + i * h)) >= 0.0;
      if (cur && !prev) {
        ++runs;
        if (first < 0) first = i;
      }
      if (cur) last = i;
      prev = cur;
    }
    if (runs == 0) {
      std::ostringstream os;
      os << "empty fiber over basis point [" << q.transpose() << "]";
      cert.detail = os.str();
      return cert;
    }
    if (runs > 1) {
      std::ostringstream os;
      os << "fiber over basis point [" << q.transpose() << "] splits into "
         << runs << " intervals";
      cert.detail = os.str();
      return cert;
    }
    if (first == 0) ++lower_domain;
    if (last == fiber_n - 1) ++upper_domain;
    cert.min_fiber_length = std::min(cert.min_fiber_length,
                                     (last - first) * h);
  }

  const int total = static_cast<int>(points.size());
  cert.lower_at_domain = lower_domain == total;
  cert.upper_at_domain = upper_domain == total;
  cert.lower_mixed = lower_domain != 0 && lower_domain != total;
  cert.upper_mixed = upper_domain != 0 && upper_domain != total;
  cert.ok = true;
  return cert;
}

}  // namespace setgeom
