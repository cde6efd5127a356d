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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "setgeom/chart.hpp"
#include "setgeom/implicit_set.hpp"
#include "setgeom/normal_set.hpp"

using namespace setgeom;

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::Vector2d v2(double a, double b) { return Eigen::Vector2d(a, b); }

// Two overlapping ellipses about the origin used throughout: a thin
// horizontal one and a tilted one reaching into the fourth quadrant.
Ellipsoid ellipse1() {
  Eigen::Matrix2d P;
  P << 16.0, 0.0, 0.0, 0.5;
  return Ellipsoid(v2(0, 0), P);
}

Ellipsoid ellipse2() {
  Eigen::Matrix2d P;
  P << 5.8551, 7.3707, 7.3707, 10.6449;
  return Ellipsoid(v2(0, 0), P);
}

ImplicitSet union_set(RFunction kind = RFunction::Smooth) {
  return r_union(ellipse1().as_implicit(), ellipse2().as_implicit(), kind);
}

// The benchmark union seen through a polar chart about the origin: angle is
// the basis coordinate, radius the fiber.
NormalSetChart polar_union() {
  return NormalSetChart(union_set(), Chart::polar(v2(0, 0), -kPi),
                        Box{{-kPi, kPi}});
}

}  // namespace

TEST_CASE("ellipsoid sign function and bounding box") {
  const ImplicitSet e1 = ellipse1().as_implicit();
  CHECK(e1.dim() == 2);
  CHECK(e1.smooth());
  CHECK(e1.has_analytic_grad());
  CHECK(e1.psi(v2(0, 0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e1.psi(v2(0.25, 0)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(e1.contains(v2(0.2, 0.5)));
  CHECK(!e1.contains(v2(0.3, 0)));

  // Half-widths are sqrt(diag(P^-1)).
  CHECK(e1.bbox()[0].lo == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(e1.bbox()[0].hi == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(e1.bbox()[1].hi ==
        doctest::Approx(1.4142135623730951).epsilon(1e-14));

  const ImplicitSet e2 = ellipse2().as_implicit();
  CHECK(e2.bbox()[0].hi ==
        doctest::Approx(1.1535408509586302).epsilon(1e-12));
  CHECK(e2.bbox()[1].hi ==
        doctest::Approx(0.85551838018276549).epsilon(1e-12));

  // Gradient of 1 - y'Py is -2Py.
  const Eigen::Vector2d y = v2(0.1, -0.3);
  const Eigen::VectorXd grad = e1.psi_grad(y);
  const Eigen::Vector2d expect = -2.0 * (ellipse1().shape * y);
  CHECK((grad - expect).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("ellipsoid constructor validates the shape matrix") {
  CHECK_THROWS_AS(Ellipsoid(v2(0, 0), Eigen::MatrixXd::Identity(3, 2)),
                  std::invalid_argument);
  Eigen::Matrix2d asym;
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(Ellipsoid(v2(0, 0), asym), std::invalid_argument);
  Eigen::Matrix2d indef;
  indef << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(Ellipsoid(v2(0, 0), indef), std::invalid_argument);
  Eigen::Matrix2d singular = Eigen::Matrix2d::Zero();
  CHECK_THROWS_AS(Ellipsoid(v2(0, 0), singular), std::invalid_argument);
}

TEST_CASE("smooth union and intersection follow the closed forms") {
  // Half-planes psi_a = y1, psi_b = y2 expose the raw composition values.
  const Box big{{-4, 4}, {-4, 4}};
  const ImplicitSet a(2, big, [](const Eigen::VectorXd& y) { return y(0); });
  const ImplicitSet b(2, big, [](const Eigen::VectorXd& y) { return y(1); });

  const ImplicitSet u = r_union(a, b);
  const ImplicitSet i = r_intersection(a, b);
  CHECK(u.psi(v2(-1, -1)) ==
        doctest::Approx(-0.58578643762690485).epsilon(1e-14));
  CHECK(u.psi(v2(0.5, -0.25)) ==
        doctest::Approx(0.80901699437494745).epsilon(1e-14));
  CHECK(i.psi(v2(0.5, -0.25)) ==
        doctest::Approx(-0.30901699437494745).epsilon(1e-14));
  CHECK(u.psi(v2(1, 1)) ==
        doctest::Approx(3.4142135623730949).epsilon(1e-14));
  CHECK(i.psi(v2(1, 1)) ==
        doctest::Approx(0.58578643762690485).epsilon(1e-14));

  // Sign semantics: union feasible iff either side is, intersection iff both.
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int k = 0; k < 500; ++k) {
    const Eigen::Vector2d y = v2(d(rng), d(rng));
    if (std::abs(y(0)) < 1e-9 || std::abs(y(1)) < 1e-9) continue;
    CHECK((u.psi(y) >= 0) == (y(0) >= 0 || y(1) >= 0));
    CHECK((i.psi(y) >= 0) == (y(0) >= 0 && y(1) >= 0));
  }

  // Exact composition is min/max and is flagged non-smooth.
  const ImplicitSet umax = r_union(a, b, RFunction::Exact);
  const ImplicitSet imin = r_intersection(a, b, RFunction::Exact);
  CHECK(!umax.smooth());
  CHECK(umax.psi(v2(0.5, -0.25)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(imin.psi(v2(0.5, -0.25)) == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("union of the benchmark ellipses") {
  const ImplicitSet u = union_set();
  CHECK(u.smooth());
  CHECK(u.has_analytic_grad());

  CHECK(u.psi(v2(0, 0)) ==
        doctest::Approx(3.4142135623730949).epsilon(1e-13));
  CHECK(u.psi(v2(0.25, 0)) == doctest::Approx(1.2681125).epsilon(1e-13));
  CHECK(u.psi(v2(1, -0.8)) ==
        doctest::Approx(0.12579626560835422).epsilon(1e-12));
  CHECK(u.psi(v2(0, 1)) ==
        doctest::Approx(0.51295152143063305).epsilon(1e-13));
  CHECK(u.psi(v2(0.2, 0.3)) ==
        doctest::Approx(0.36013121385955194).epsilon(1e-13));
  CHECK(u.psi(v2(0.1, -0.05)) ==
        doctest::Approx(3.1237197248107726).epsilon(1e-13));

  const ImplicitSet inter =
      r_intersection(ellipse1().as_implicit(), ellipse2().as_implicit());
  CHECK(inter.psi(v2(0, 0)) ==
        doctest::Approx(0.58578643762690485).epsilon(1e-13));

  // The union bbox is the hull of the member boxes.
  CHECK(u.bbox()[0].hi ==
        doctest::Approx(1.1535408509586302).epsilon(1e-12));
  CHECK(u.bbox()[1].hi ==
        doctest::Approx(1.4142135623730951).epsilon(1e-12));

  // Boundary crossing on the positive x1 axis.
  CHECK(std::abs(u.psi(v2(0.41326901163966168, 0))) < 1e-9);

  // Membership agrees with evaluating the parts directly.
  const ImplicitSet e1 = ellipse1().as_implicit();
  const ImplicitSet e2 = ellipse2().as_implicit();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dx(-1.3, 1.3);
  std::uniform_real_distribution<double> dy(-1.6, 1.6);
  for (int k = 0; k < 2000; ++k) {
    const Eigen::Vector2d y = v2(dx(rng), dy(rng));
    const double direct = std::max(e1.psi(y), e2.psi(y));
    if (std::abs(direct) < 1e-6) continue;  // skip the boundary band
    CHECK((u.psi(y) >= 0) == (direct >= 0));
  }

  // Analytic gradient matches finite differences away from the corner locus.
  for (const auto& y : {v2(0.2, 0.3), v2(1, -0.8), v2(-0.1, 1.0),
                        v2(0.05, -0.4), v2(-0.9, 0.6)}) {
    const Eigen::VectorXd g = u.psi_grad(y);
    Eigen::Vector2d fd;
    const double h = 1e-6;
    for (int i = 0; i < 2; ++i) {
      Eigen::Vector2d yp = y, ym = y;
      yp(i) += h;
      ym(i) -= h;
      fd(i) = (u.psi(yp) - u.psi(ym)) / (2 * h);
    }
    CHECK((g - fd).lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("identity and polar charts") {
  const Chart id = Chart::identity(3);
  const Eigen::Vector3d y(0.3, -1.0, 2.5);
  CHECK((id.from_chart(id.to_chart(y)) - y).norm() == 0.0);
  CHECK(id.from_chart_jacobian(y).isIdentity(1e-15));

  const Chart pol = Chart::polar(v2(0, 0), -kPi);
  const Eigen::VectorXd v = pol.to_chart(v2(0.2, 0.3));
  CHECK(v(0) == doctest::Approx(0.98279372324732905).epsilon(1e-14));
  CHECK(v(1) == doctest::Approx(0.3605551275463989).epsilon(1e-14));
  CHECK((pol.from_chart(v) - v2(0.2, 0.3)).norm() < 1e-14);

  // Round trip from chart coordinates.
  const Eigen::Vector2d w = v2(-2.1, 0.7);
  CHECK((pol.to_chart(pol.from_chart(w)) - w).norm() < 1e-13);

  // The angle wraps into [branch_lo, branch_lo + 2*pi).
  const Eigen::VectorXd seam = pol.to_chart(v2(-1.0, -1e-9));
  CHECK(seam(0) == doctest::Approx(-3.141592652589793).epsilon(1e-12));
  CHECK(seam(0) >= -kPi);
  CHECK(seam(0) < kPi);

  const Chart shifted = Chart::polar(v2(0, 0), 0.0);
  const Eigen::VectorXd below = shifted.to_chart(v2(1.0, -1.0));
  CHECK(below(0) == doctest::Approx(2 * kPi - kPi / 4).epsilon(1e-13));

  CHECK_THROWS_AS(pol.to_chart(v2(0, 0)), undefined_angle_error);

  // from_chart Jacobian against finite differences.
  const Eigen::Vector2d c = v2(0.7, 1.3);
  const Eigen::MatrixXd J = pol.from_chart_jacobian(c);
  const double h = 1e-7;
  for (int i = 0; i < 2; ++i) {
    Eigen::Vector2d cp = c, cm = c;
    cp(i) += h;
    cm(i) -= h;
    const Eigen::VectorXd col = (pol.from_chart(cp) - pol.from_chart(cm)) / (2 * h);
    CHECK((J.col(i) - col).lpNorm<Eigen::Infinity>() < 1e-7);
  }
}

TEST_CASE("fiber extremes over the benchmark union") {
  const NormalSetChart ns = polar_union();
  CHECK(ns.fiber_dim() == 1);
  CHECK(ns.basis_dims() == std::vector<int>{0});
  CHECK(ns.fiber_domain().lo == 0.0);

  Eigen::VectorXd q(1);

  q << 0.0;
  FiberExtremes fe = fiber_extremes(ns, q);
  CHECK(fe.lo == 0.0);  // the center is a member, so the fiber starts at it
  CHECK(fe.hi == doctest::Approx(0.41326901163966173).epsilon(1e-9));

  q << kPi / 2;
  fe = fiber_extremes(ns, q);
  CHECK(fe.lo == 0.0);
  CHECK(fe.hi == doctest::Approx(1.4142135623730951).epsilon(1e-9));

  q << kPi / 4;
  fe = fiber_extremes(ns, q);
  CHECK(fe.hi == doctest::Approx(0.34815531191139565).epsilon(1e-9));

  q << -0.67474094222355274;  // direction of the target (1, -0.8)
  fe = fiber_extremes(ns, q);
  CHECK(fe.hi == doctest::Approx(1.3692677792861798).epsilon(1e-9));

  // Brute radial scan agreement across the whole basis range.
  const ImplicitSet u = union_set();
  for (int k = 0; k < 60; ++k) {
    const double a = -kPi + (2 * kPi) * (k + 0.5) / 60.0;
    q << a;
    fe = fiber_extremes(ns, q);
    double brute = 0.0;
    const int n = 20000;
    for (int j = 0; j < n; ++j) {
      const double r = 1.5 * j / (n - 1.0);
      if (u.psi(v2(r * std::cos(a), r * std::sin(a))) >= 0.0) brute = r;
    }
    CHECK(fe.lo == 0.0);
    CHECK(fe.hi == doctest::Approx(brute).epsilon(5e-4));
  }

  Eigen::VectorXd outside(1);
  outside << 4.0;
  CHECK_THROWS_AS(fiber_extremes(ns, outside), std::invalid_argument);
}

TEST_CASE("straightening homeomorphism round trip") {
  const NormalSetChart ns = polar_union();
  const ImplicitSet u = union_set();

  // forward(inverse(v)) == v for members, and images are members.
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> da(-kPi, kPi);
  std::uniform_real_distribution<double> dt(0.0, 1.0);
  int tested = 0;
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd theta(2);
    theta << da(rng), dt(rng);
    const Eigen::VectorXd v = homeo_forward(ns, theta);
    const Eigen::Vector2d y = ns.chart().from_chart(v);
    CHECK(u.psi(y) >= -1e-9);
    const Eigen::VectorXd back = homeo_inverse(ns, v);
    CHECK((back - theta).lpNorm<Eigen::Infinity>() < 1e-8);
    ++tested;
  }
  CHECK(tested == 200);

  // Normalized coordinate 0 and 1 land on the fiber extremes.
  Eigen::VectorXd theta(2);
  theta << 0.3, 1.0;
  Eigen::VectorXd q(1);
  q << 0.3;
  const FiberExtremes fe = fiber_extremes(ns, q);
  CHECK(homeo_forward(ns, theta)(1) == doctest::Approx(fe.hi).epsilon(1e-12));
  theta(1) = 0.0;
  CHECK(homeo_forward(ns, theta)(1) == doctest::Approx(fe.lo).epsilon(1e-12));

  // A known interior member.
  const Chart& chart = ns.chart();
  const Eigen::VectorXd v = chart.to_chart(v2(0.2, 0.3));
  const Eigen::VectorXd th = homeo_inverse(ns, v);
  CHECK(th(0) == doctest::Approx(0.98279372324732905).epsilon(1e-12));
  CHECK(th(1) == doctest::Approx(0.82764726786234233).epsilon(1e-7));

  // Target direction used by the closed-loop scenarios.
  const Eigen::VectorXd vt = chart.to_chart(v2(1.0, -0.8));
  const Eigen::VectorXd tht = homeo_inverse(ns, vt);
  CHECK(tht(0) == doctest::Approx(-0.67474094222355274).epsilon(1e-12));
  CHECK(tht(1) == doctest::Approx(0.93526252998823878).epsilon(1e-7));

  // Non-members are rejected; the extended map still transforms them.
  const Eigen::VectorXd vo = chart.to_chart(v2(2.0, 0.0));
  CHECK_THROWS_AS(homeo_inverse(ns, vo), outside_set_error);
  const Eigen::VectorXd ext = homeo_inverse_extended(ns, vo);
  CHECK(ext(1) > 1.0);
  CHECK(ext(1) == doctest::Approx(4.8394627801027665).epsilon(1e-7));

  CHECK(homeo_forward(ns, ext.cwiseMin(1.0))(1) ==
        doctest::Approx(0.41326901163966173).epsilon(1e-8));

  Eigen::VectorXd bad(2);
  bad << 0.3, 1.5;  // normalized coordinate outside [0, 1]
  CHECK_THROWS_AS(homeo_forward(ns, bad), std::invalid_argument);
}

TEST_CASE("lambda substitution equals the forward map at the true extremes") {
  const NormalSetChart ns = polar_union();
  Eigen::VectorXd q(1), theta(2);
  for (double a : {-2.5, -0.674740942223553, 0.0, 0.8, 2.9}) {
    q << a;
    const FiberExtremes fe = fiber_extremes(ns, q);
    for (double t : {0.0, 0.25, 0.7, 1.0}) {
      theta << a, t;
      const Eigen::VectorXd via_lambda = lambda_map(ns, theta, fe.lo, fe.hi);
      const Eigen::VectorXd via_forward = homeo_forward(ns, theta);
      CHECK((via_lambda - via_forward).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }
}

TEST_CASE("empty, split, and collapsed fibers are reported") {
  const Box region{{-1, 1}};
  const Box bbox{{-1, 1}, {-1, 1}};
  const Chart id = Chart::identity(2);

  // Empty everywhere.
  const ImplicitSet empty(2, bbox,
                          [](const Eigen::VectorXd&) { return -1.0; });
  const NormalSetChart ns_empty(empty, id, region);
  Eigen::VectorXd q(1);
  q << 0.1;
  CHECK_THROWS_AS(fiber_extremes(ns_empty, q), infeasible_fiber_error);

  // Two feasible intervals along the fiber: |f| >= 0.5.
  const ImplicitSet split(2, bbox, [](const Eigen::VectorXd& y) {
    return y(1) * y(1) - 0.25;
  });
  const NormalSetChart ns_split(split, id, region);
  CHECK_THROWS_AS(fiber_extremes(ns_split, q), normality_error);

  // Feasible only at f == 0: the fiber collapses to a point, which the
  // normalized coordinate cannot invert. An odd sample count lands on it.
  const ImplicitSet line(2, bbox, [](const Eigen::VectorXd& y) {
    return -y(1) * y(1);
  });
  const NormalSetChart ns_line(line, id, region);
  FiberOptions opts;
  opts.scan_samples = 513;
  const FiberExtremes fe = fiber_extremes(ns_line, q, opts);
  CHECK(fe.length() < 1e-12);
  Eigen::VectorXd v(2);
  v << 0.1, 0.0;
  CHECK_THROWS_AS(homeo_inverse(ns_line, v, opts), degenerate_fiber_error);
}

TEST_CASE("normality certificate for the benchmark set") {
  const NormalSetChart ns = polar_union();
  const NormalityCertificate cert = certify_normality(ns, 257, 1e-3);
  CHECK(cert.ok);
  CHECK(cert.lower_at_domain);   // star-shaped about the origin
  CHECK(!cert.upper_at_domain);  // the outer boundary is interior to the bbox
  CHECK(!cert.lower_mixed);
  CHECK(!cert.upper_mixed);
  CHECK(cert.min_fiber_length > 0.25);  // narrowest ray, near the reentrant
  CHECK(cert.min_fiber_length < 0.45);  // corner where the boundaries cross

  // A split set fails with a diagnostic naming the interval count.
  const Box region{{-1, 1}};
  const Box bbox{{-1, 1}, {-1, 1}};
  const ImplicitSet split(2, bbox, [](const Eigen::VectorXd& y) {
    return y(1) * y(1) - 0.25;
  });
  const NormalSetChart ns_split(split, Chart::identity(2), region);
  const NormalityCertificate bad = certify_normality(ns_split, 33, 1e-3);
  CHECK(!bad.ok);
  CHECK(bad.detail.find("intervals") != std::string::npos);
}

TEST_CASE("probe checks: continuity, bbox containment, lipschitz") {
  const ImplicitSet u = union_set();
  CHECK(check_continuity(u).ok);
  CHECK(check_bbox_containment(u).ok);

  // A jump discontinuity is caught by the bisection probe.
  const Box bbox{{-1, 1}, {-1, 1}};
  const ImplicitSet jump(2, bbox, [](const Eigen::VectorXd& y) {
    return y(0) < 0.0 ? 1.0 : -1.0;
  });
  CHECK(!check_continuity(jump).ok);

  // A bbox that clips the set is caught by the containment probe.
  const ImplicitSet lying(2, bbox, [](const Eigen::VectorXd& y) {
    return 4.0 - y.squaredNorm();
  });
  CHECK(!check_bbox_containment(lying).ok);

  const double lip = estimate_lipschitz(ellipse1().as_implicit());
  CHECK(lip > 4.0);
  CHECK(lip < 10.0);
}
