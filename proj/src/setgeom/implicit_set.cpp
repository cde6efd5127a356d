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

#include "setgeom/implicit_set.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace setgeom {

namespace {

double fd_step(double x) { return 1e-7 * std::max(1.0, std::abs(x)); }

}  // namespace

ImplicitSet::ImplicitSet(int dim, Box bbox, PsiFn psi, PsiGradFn grad,
                         bool smooth)
    : dim_(dim),
      bbox_(std::move(bbox)),
      psi_(std::move(psi)),
      grad_(std::move(grad)),
      smooth_(smooth) {
  if (dim_ <= 0) throw std::invalid_argument("ImplicitSet: dim must be >= 1");
  if (static_cast<int>(bbox_.size()) != dim_)
    throw std::invalid_argument("ImplicitSet: bbox size must equal dim");
  for (const auto& iv : bbox_)
    if (!(iv.lo <= iv.hi))
      throw std::invalid_argument("ImplicitSet: bbox interval has lo > hi");
  if (!psi_) throw std::invalid_argument("ImplicitSet: psi is required");
}

void ImplicitSet::check_dim(const Eigen::VectorXd& y) const {
  if (y.size() != dim_) {
    std::ostringstream os;
    os << "ImplicitSet: argument has dimension " << y.size() << ", expected "
       << dim_;
    throw std::invalid_argument(os.str());
  }
}

double ImplicitSet::psi(const Eigen::VectorXd& y) const {
  check_dim(y);
  return psi_(y);
}

Eigen::VectorXd ImplicitSet::psi_grad(const Eigen::VectorXd& y) const {
  check_dim(y);
  if (grad_) return grad_(y);
  Eigen::VectorXd g(dim_);
  Eigen::VectorXd yp = y;
  for (int i = 0; i < dim_; ++i) {
    const double h = fd_step(y(i));
    yp(i) = y(i) + h;
    const double fp = psi_(yp);
    yp(i) = y(i) - h;
    const double fm = psi_(yp);
    yp(i) = y(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Ellipsoid::Ellipsoid(Eigen::VectorXd center_, Eigen::MatrixXd shape_)
    : center(std::move(center_)), shape(std::move(shape_)) {
  if (shape.rows() != shape.cols() || shape.rows() != center.size())
    throw std::invalid_argument("Ellipsoid: shape must be square, size of center");
  const double asym = (shape - shape.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    throw std::invalid_argument("Ellipsoid: shape matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shape);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("Ellipsoid: shape matrix not positive definite");
}

ImplicitSet Ellipsoid::as_implicit() const {
  const Eigen::VectorXd c = center;
  const Eigen::MatrixXd P = shape;
  const Eigen::MatrixXd Pinv = P.ldlt().solve(
      Eigen::MatrixXd::Identity(P.rows(), P.cols()));
  Box bbox(c.size());
  for (int i = 0; i < c.size(); ++i) {
    const double hw = std::sqrt(std::max(0.0, Pinv(i, i)));
    bbox[i] = {c(i) - hw, c(i) + hw};
  }
  auto psi = [c, P](const Eigen::VectorXd& y) {
    const Eigen::VectorXd d = y - c;
    return 1.0 - d.dot(P * d);
  };
  auto grad = [c, P](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return -2.0 * (P * (y - c));
  };
  return ImplicitSet(static_cast<int>(c.size()), std::move(bbox), psi, grad);
}

namespace {

Box box_hull(const Box& a, const Box& b) {
  Box out(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    out[i] = {std::min(a[i].lo, b[i].lo), std::max(a[i].hi, b[i].hi)};
  return out;
}

Box box_meet(const Box& a, const Box& b) {
  Box out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    const double lo = std::max(a[i].lo, b[i].lo);
    const double hi = std::min(a[i].hi, b[i].hi);
    out[i] = {lo, std::max(lo, hi)};
  }
  return out;
}

void check_compose(const ImplicitSet& a, const ImplicitSet& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("r-function composition: dimension mismatch");
}

// Rvachev R0 blends: zero level equals the boolean of the operand zero
// levels, values stay sign-correct everywhere.
double r0_union(double pa, double pb) {
  return pa + pb + std::sqrt(pa * pa + pb * pb);
}
double r0_intersection(double pa, double pb) {
  return pa + pb - std::sqrt(pa * pa + pb * pb);
}

}  // namespace

ImplicitSet r_union(const ImplicitSet& a, const ImplicitSet& b,
                    RFunction kind) {
  check_compose(a, b);
  const bool smooth =
      kind == RFunction::Smooth && a.smooth() && b.smooth();
  PsiFn psi;
  if (kind == RFunction::Smooth) {
    psi = [a, b](const Eigen::VectorXd& y) {
      return r0_union(a.psi(y), b.psi(y));
    };
  } else {
    psi = [a, b](const Eigen::VectorXd& y) {
      return std::max(a.psi(y), b.psi(y));
    };
  }
  PsiGradFn grad;
  if (kind == RFunction::Smooth && a.has_analytic_grad() &&
      b.has_analytic_grad()) {
    grad = [a, b](const Eigen::VectorXd& y) -> Eigen::VectorXd {
      const double pa = a.psi(y), pb = b.psi(y);
      const double r = std::sqrt(pa * pa + pb * pb);
      const Eigen::VectorXd ga = a.psi_grad(y), gb = b.psi_grad(y);
      if (r == 0.0) return ga + gb;  // joint zero locus: subgradient choice
      return ga + gb + (pa * ga + pb * gb) / r;
    };
  }
  return ImplicitSet(a.dim(), box_hull(a.bbox(), b.bbox()), std::move(psi),
                     std::move(grad), smooth);
}

ImplicitSet r_intersection(const ImplicitSet& a, const ImplicitSet& b,
                           RFunction kind) {
  check_compose(a, b);
  const bool smooth =
      kind == RFunction::Smooth && a.smooth() && b.smooth();
  PsiFn psi;
  if (kind == RFunction::Smooth) {
    psi = [a, b](const Eigen::VectorXd& y) {
      return r0_intersection(a.psi(y), b.psi(y));
    };
  } else {
    psi = [a, b](const Eigen::VectorXd& y) {
      return std::min(a.psi(y), b.psi(y));
    };
  }
  PsiGradFn grad;
  if (kind == RFunction::Smooth && a.has_analytic_grad() &&
      b.has_analytic_grad()) {
    grad = [a, b](const Eigen::VectorXd& y) -> Eigen::VectorXd {
      const double pa = a.psi(y), pb = b.psi(y);
      const double r = std::sqrt(pa * pa + pb * pb);
      const Eigen::VectorXd ga = a.psi_grad(y), gb = b.psi_grad(y);
      if (r == 0.0) return ga + gb;
      return ga + gb - (pa * ga + pb * gb) / r;
    };
  }
  return ImplicitSet(a.dim(), box_meet(a.bbox(), b.bbox()), std::move(psi),
                     std::move(grad), smooth);
}

ProbeReport check_continuity(const ImplicitSet& set, int probes,
                             double spacing, double tol, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Box& bb = set.bbox();
  const int d = set.dim();

  double diag = 0.0;
  for (const auto& iv : bb) diag += iv.length() * iv.length();
  diag = std::sqrt(diag);
  const double h = spacing * std::max(diag, 1.0);

  auto sample_point = [&](Eigen::VectorXd& y) {
    for (int i = 0; i < d; ++i)
      y(i) = bb[i].lo + unit(rng) * (bb[i].lo == bb[i].hi ? 0.0
                                                          : bb[i].length());
  };

  Eigen::VectorXd a(d), b(d);
  for (int probe = 0; probe < probes; ++probe) {
    sample_point(a);
    sample_point(b);
    const double len = (b - a).norm();
    if (len < 10 * h) continue;
    const Eigen::VectorXd dir = (b - a) / len;
    const int steps = static_cast<int>(len / h);
    double prev = set.psi(a);
    for (int s = 1; s <= steps; ++s) {
      const Eigen::VectorXd y = a + (s * h) * dir;
      const double cur = set.psi(y);
      if ((prev > 0 && cur < 0) || (prev < 0 && cur > 0)) {
        // Bisect the flip bracket; a continuous psi drives one endpoint
        // under tol, a jump stays bounded away from zero on both sides.
        double tlo = (s - 1) * h, thi = s * h;
        double plo = prev, phi = cur;
        for (int it = 0; it < 60 && thi - tlo > 1e-15 * len; ++it) {
          const double tm = 0.5 * (tlo + thi);
          const double pm = set.psi(a + tm * dir);
          if ((pm >= 0) == (plo >= 0)) {
            tlo = tm;
            plo = pm;
          } else {
            thi = tm;
            phi = pm;
          }
        }
        if (std::min(std::abs(plo), std::abs(phi)) > tol) {
          std::ostringstream os;
          os << "sign flip without near-zero crossing near ["
             << (a + tlo * dir).transpose() << "], |psi| stuck at "
             << std::min(std::abs(plo), std::abs(phi));
          return {false, os.str()};
        }
      }
      prev = cur;
    }
  }
  return {true, ""};
}

ProbeReport check_bbox_containment(const ImplicitSet& set, int samples,
                                   unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Box& bb = set.bbox();
  const int d = set.dim();
  Eigen::VectorXd y(d);
  for (int s = 0; s < samples; ++s) {
    bool inside_bbox = true;
    for (int i = 0; i < d; ++i) {
      const double c = 0.5 * (bb[i].lo + bb[i].hi);
      const double hw = 0.75 * std::max(bb[i].length(), 1e-12);
      y(i) = c + (2.0 * unit(rng) - 1.0) * hw;  // inflated box, factor 1.5
      inside_bbox = inside_bbox && bb[i].contains(y(i));
    }
    if (!inside_bbox && set.psi(y) >= 0.0) {
      std::ostringstream os;
      os << "member outside bbox at [" << y.transpose() << "]";
      return {false, os.str()};
    }
  }
  return {true, ""};
}

double estimate_lipschitz(const ImplicitSet& set, int samples, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Box& bb = set.bbox();
  const int d = set.dim();

  double diag = 0.0;
  for (const auto& iv : bb) diag += iv.length() * iv.length();
  diag = std::sqrt(std::max(diag, 1e-12));

  double best = 0.0;
  Eigen::VectorXd y(d), step(d);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < d; ++i) y(i) = bb[i].lo + unit(rng) * bb[i].length();
    for (int i = 0; i < d; ++i) step(i) = gauss(rng);
    const double nrm = step.norm();
    if (nrm == 0.0) continue;
    step *= (1e-4 * diag) / nrm;
    const double df = std::abs(set.psi(y + step) - set.psi(y));
    best = std::max(best, df / step.norm());
  }
  return best;
}

}  // namespace setgeom
