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

#include "mpct/tracking_mpc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace mpct {

namespace {

void check_weight(const Eigen::MatrixXd& W, int dim, const char* name,
                  bool strictly_positive) {
  if (W.rows() != dim || W.cols() != dim) {
    std::ostringstream os;
    os << "TrackingMpc: weight " << name << " must be " << dim << "x" << dim;
    throw std::invalid_argument(os.str());
  }
  const double scale = std::max(1.0, W.cwiseAbs().maxCoeff());
  if ((W - W.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw std::invalid_argument(std::string("TrackingMpc: weight ") + name +
                                " must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
  const double lo = es.eigenvalues().minCoeff();
  if (strictly_positive ? lo <= 0.0 : lo < -1e-9 * scale)
    throw std::invalid_argument(std::string("TrackingMpc: weight ") + name +
                                (strictly_positive
                                     ? " must be positive definite"
                                     : " must be positive semidefinite"));
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Standard:
      return "standard";
    case Mode::Homeo:
      return "homeo";
    case Mode::Normal:
      return "normal";
  }
  return "unknown";
}

struct TrackingMpc::Core {
  plant::PlantModel model;
  MpcConfig cfg;
  Mode mode = Mode::Standard;

  std::optional<setgeom::NormalSetChart> ns;
  bool lower_pin_at_domain = false;
  bool upper_pin_at_domain = false;

  int n = 0, m = 0, p = 0, Nc = 0;
  int nu = 0;    // m * Nc
  int nref = 0;  // p, or p + 2 with explicit fiber extremes
  int dim = 0;
  int iref = 0;
  int ilam_lo = -1, ilam_hi = -1;

  int iu(int j) const { return j * m; }

  // ---- rollout ----------------------------------------------------------

  Eigen::MatrixXd rollout(const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& z) const {
    Eigen::MatrixXd X(n, Nc + 1);
    X.col(0) = x0;
    for (int j = 0; j < Nc; ++j)
      X.col(j + 1) = model.f(X.col(j), z.segment(iu(j), m));
    return X;
  }

  // Sensitivities of each state in the rollout wrt the stacked inputs.
  void rollout_with_sens(const Eigen::VectorXd& x0, const Eigen::VectorXd& z,
                         Eigen::MatrixXd& X,
                         std::vector<Eigen::MatrixXd>& M) const {
    X.resize(n, Nc + 1);
    X.col(0) = x0;
    M.assign(Nc + 1, Eigen::MatrixXd::Zero(n, nu));
    for (int j = 0; j < Nc; ++j) {
      const Eigen::VectorXd uj = z.segment(iu(j), m);
      const Eigen::MatrixXd A = plant::step_jacobian_x(model, X.col(j), uj);
      const Eigen::MatrixXd Bm = plant::step_jacobian_u(model, X.col(j), uj);
      M[j + 1] = A * M[j];
      M[j + 1].middleCols(iu(j), m) += Bm;
      X.col(j + 1) = model.f(X.col(j), uj);
    }
  }

  // ---- reference map ----------------------------------------------------

  // Chart-space point of the artificial reference.
  Eigen::VectorXd ref_chart_point(const Eigen::VectorXd& z) const {
    const Eigen::VectorXd ref = z.segment(iref, nref);
    switch (mode) {
      case Mode::Standard:
        return ref;
      case Mode::Homeo:
        return setgeom::homeo_forward(*ns, ref.head(p), cfg.fiber);
      case Mode::Normal:
        return setgeom::lambda_map(*ns, ref.head(p), ref(p), ref(p + 1));
    }
    return ref;
  }

  Eigen::VectorXd ys_of(const Eigen::VectorXd& z) const {
    const Eigen::VectorXd w = ref_chart_point(z);
    return mode == Mode::Standard ? w : ns->chart().from_chart(w);
  }

  // d(y_s)/d(ref block), p x nref.
  Eigen::MatrixXd ys_jacobian(const Eigen::VectorXd& z) const {
    if (mode == Mode::Standard) return Eigen::MatrixXd::Identity(p, p);
    if (mode == Mode::Normal) {
      const Eigen::VectorXd ref = z.segment(iref, nref);
      const double lam_lo = ref(p), lam_hi = ref(p + 1);
      const int fd = ns->fiber_dim();
      Eigen::MatrixXd D = Eigen::MatrixXd::Zero(p, nref);
      for (int k = 0; k < p; ++k)
        if (k != fd) D(k, k) = 1.0;
      D(fd, fd) = lam_hi - lam_lo;
      D(fd, p) = 1.0 - ref(fd);
      D(fd, p + 1) = ref(fd);
      const Eigen::VectorXd w = setgeom::lambda_map(*ns, ref.head(p), lam_lo,
                                                    lam_hi);
      return ns->chart().from_chart_jacobian(w) * D;
    }
    // Homeo: differentiate the full straightening map numerically; the
    // fiber extremes are only available through a scan.
    const Eigen::VectorXd theta = z.segment(iref, p);
    Eigen::MatrixXd J(p, p);
    const double h = 1e-5;
    for (int k = 0; k < p; ++k) {
      double lo = theta(k) - h, hi = theta(k) + h;
      if (k == ns->fiber_dim()) {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, 1.0);
      } else {
        int bi = 0;
        for (size_t b = 0; b < ns->basis_dims().size(); ++b)
          if (ns->basis_dims()[b] == k) bi = static_cast<int>(b);
        lo = std::max(lo, ns->basis_region()[bi].lo);
        hi = std::min(hi, ns->basis_region()[bi].hi);
      }
      Eigen::VectorXd tp = theta, tm = theta;
      tp(k) = hi;
      tm(k) = lo;
      const Eigen::VectorXd yp =
          ns->chart().from_chart(setgeom::homeo_forward(*ns, tp, cfg.fiber));
      const Eigen::VectorXd ym =
          ns->chart().from_chart(setgeom::homeo_forward(*ns, tm, cfg.fiber));
      J.col(k) = (yp - ym) / (hi - lo);
    }
    return J;
  }

  const setgeom::ImplicitSet& stage_set() const {
    return mode == Mode::Standard ? model.constraints.output_set
                                  : ns->cartesian_set();
  }

  // ---- constraint blocks -------------------------------------------------

  int eq_rows() const { return n + (mode == Mode::Normal ? 2 : 0); }
  int ineq_rows() const {
    int r = Nc - 1;                       // stage membership
    if (mode == Mode::Standard) r += 1;   // reference membership w/ margin
    if (mode == Mode::Normal) r += 1;     // extreme ordering gap
    return r;
  }

  Eigen::VectorXd eq_values(const Eigen::VectorXd& x0,
                            const Eigen::VectorXd& z) const {
    const Eigen::MatrixXd X = rollout(x0, z);
    const Eigen::VectorXd ys = ys_of(z);
    Eigen::VectorXd c(eq_rows());
    c.head(n) = X.col(Nc) - plant::steady_state(model, ys).first;
    if (mode == Mode::Normal) {
      const Eigen::VectorXd ref = z.segment(iref, nref);
      const Eigen::VectorXd q = ns->basis_of(ref.head(p));
      const auto dom = ns->fiber_domain();
      c(n) = upper_pin_at_domain
                 ? ref(p + 1) - dom.hi
                 : ns->chart_set().psi(ns->assemble(q, ref(p + 1)));
      c(n + 1) = lower_pin_at_domain
                     ? ref(p) - dom.lo
                     : ns->chart_set().psi(ns->assemble(q, ref(p)));
    }
    return c;
  }

  Eigen::MatrixXd eq_jacobian(const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& z) const {
    Eigen::MatrixXd X;
    std::vector<Eigen::MatrixXd> M;
    rollout_with_sens(x0, z, X, M);
    const Eigen::VectorXd ys = ys_of(z);
    const Eigen::MatrixXd G = plant::steady_state_jacobian(model, ys);
    const Eigen::MatrixXd Jref = ys_jacobian(z);

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(eq_rows(), dim);
    J.block(0, 0, n, nu) = M[Nc];
    J.block(0, iref, n, nref) = -G * Jref;

    if (mode == Mode::Normal) {
      const Eigen::VectorXd ref = z.segment(iref, nref);
      const Eigen::VectorXd q = ns->basis_of(ref.head(p));
      const int fd = ns->fiber_dim();
      if (upper_pin_at_domain) {
        J(n, iref + p + 1) = 1.0;
      } else {
        const Eigen::VectorXd pt = ns->assemble(q, ref(p + 1));
        const Eigen::VectorXd gpsi = ns->chart_set().psi_grad(pt);
        for (int k = 0; k < p; ++k)
          if (k != fd) J(n, iref + k) = gpsi(k);
        J(n, iref + p + 1) = gpsi(fd);
      }
      if (lower_pin_at_domain) {
        J(n + 1, iref + p) = 1.0;
      } else {
        const Eigen::VectorXd pt = ns->assemble(q, ref(p));
        const Eigen::VectorXd gpsi = ns->chart_set().psi_grad(pt);
        for (int k = 0; k < p; ++k)
          if (k != fd) J(n + 1, iref + k) = gpsi(k);
        J(n + 1, iref + p) = gpsi(fd);
      }
    }
    return J;
  }

  Eigen::VectorXd ineq_values(const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& z) const {
    const Eigen::MatrixXd X = rollout(x0, z);
    Eigen::VectorXd c(ineq_rows());
    int r = 0;
    for (int j = 1; j < Nc; ++j, ++r)
      c(r) = stage_set().psi(
          model.h(X.col(j), z.segment(iu(j), m)));
    if (mode == Mode::Standard) {
      const Eigen::VectorXd ys = z.segment(iref, p);
      c(r++) = model.constraints.output_set.psi(ys) - cfg.delta_eps;
    }
    if (mode == Mode::Normal)
      c(r++) = z(iref + p + 1) - z(iref + p) - cfg.epsilon_lambda;
    return c;
  }

  Eigen::MatrixXd ineq_jacobian(const Eigen::VectorXd& x0,
                                const Eigen::VectorXd& z) const {
    Eigen::MatrixXd X;
    std::vector<Eigen::MatrixXd> M;
    rollout_with_sens(x0, z, X, M);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(ineq_rows(), dim);
    int r = 0;
    for (int j = 1; j < Nc; ++j, ++r) {
      const Eigen::VectorXd uj = z.segment(iu(j), m);
      const Eigen::VectorXd yj = model.h(X.col(j), uj);
      const Eigen::VectorXd gpsi = stage_set().psi_grad(yj);
      const Eigen::MatrixXd Hx = plant::output_jacobian_x(model, X.col(j), uj);
      J.block(r, 0, 1, nu) = (gpsi.transpose() * Hx) * M[j];
      const Eigen::MatrixXd Hu = plant::output_jacobian_u(model, X.col(j), uj);
      J.block(r, iu(j), 1, m) += gpsi.transpose() * Hu;
    }
    if (mode == Mode::Standard) {
      const Eigen::VectorXd ys = z.segment(iref, p);
      J.block(r, iref, 1, p) =
          model.constraints.output_set.psi_grad(ys).transpose();
      ++r;
    }
    if (mode == Mode::Normal) {
      J(r, iref + p) = -1.0;
      J(r, iref + p + 1) = 1.0;
      ++r;
    }
    return J;
  }

  // ---- cost --------------------------------------------------------------

  double cost_value(const Eigen::VectorXd& x0, const Eigen::VectorXd& z,
                    const Eigen::VectorXd& target_ref) const {
    const Eigen::MatrixXd X = rollout(x0, z);
    const Eigen::VectorXd ys = ys_of(z);
    const auto steady = plant::steady_state(model, ys);
    double c = 0.0;
    for (int j = 0; j < Nc; ++j) {
      const Eigen::VectorXd ex = X.col(j) - steady.first;
      const Eigen::VectorXd eu = z.segment(iu(j), m) - steady.second;
      c += ex.dot(cfg.Q * ex) + eu.dot(cfg.R * eu);
    }
    const Eigen::VectorXd eo = offset_arg(z) - target_ref;
    c += eo.dot(cfg.T * eo);
    return c;
  }

  // The offset penalty acts on y_s directly (Standard) or on the
  // straightened reference (Homeo/Normal).
  Eigen::VectorXd offset_arg(const Eigen::VectorXd& z) const {
    return z.segment(iref, p);
  }

  Eigen::VectorXd cost_gradient(const Eigen::VectorXd& x0,
                                const Eigen::VectorXd& z,
                                const Eigen::VectorXd& target_ref) const {
    Eigen::MatrixXd X;
    std::vector<Eigen::MatrixXd> M;
    rollout_with_sens(x0, z, X, M);
    const Eigen::VectorXd ys = ys_of(z);
    const auto steady = plant::steady_state(model, ys);
    const Eigen::MatrixXd Jref = ys_jacobian(z);
    const Eigen::MatrixXd Gx_ref = plant::steady_state_jacobian(model, ys) * Jref;
    const Eigen::MatrixXd Gu_ref = plant::steady_input_jacobian(model, ys) * Jref;

    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    for (int j = 0; j < Nc; ++j) {
      const Eigen::VectorXd qx = 2.0 * (cfg.Q * (X.col(j) - steady.first));
      g.head(nu) += M[j].transpose() * qx;
      g.segment(iref, nref) -= Gx_ref.transpose() * qx;
      const Eigen::VectorXd ru =
          2.0 * (cfg.R * (z.segment(iu(j), m) - steady.second));
      g.segment(iu(j), m) += ru;
      g.segment(iref, nref) -= Gu_ref.transpose() * ru;
    }
    g.segment(iref, p) += 2.0 * (cfg.T * (offset_arg(z) - target_ref));
    return g;
  }

  // ---- box ---------------------------------------------------------------

  void fill_bounds(Eigen::VectorXd& lower, Eigen::VectorXd& upper) const {
    lower = Eigen::VectorXd::Constant(dim, -std::numeric_limits<double>::infinity());
    upper = Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::infinity());
    for (int j = 0; j < Nc; ++j) {
      lower.segment(iu(j), m) = model.constraints.input_lo;
      upper.segment(iu(j), m) = model.constraints.input_hi;
    }
    if (mode == Mode::Standard) {
      const auto& bb = model.constraints.output_set.bbox();
      for (int k = 0; k < p; ++k) {
        lower(iref + k) = bb[k].lo;
        upper(iref + k) = bb[k].hi;
      }
      return;
    }
    const auto& region = ns->basis_region();
    const auto& bd = ns->basis_dims();
    for (size_t i = 0; i < bd.size(); ++i) {
      lower(iref + bd[i]) = region[i].lo;
      upper(iref + bd[i]) = region[i].hi;
    }
    lower(iref + ns->fiber_dim()) = 0.0;
    upper(iref + ns->fiber_dim()) = 1.0;
    if (mode == Mode::Normal) {
      const auto dom = ns->fiber_domain();
      lower(iref + p) = dom.lo;
      upper(iref + p) = dom.hi;
      lower(iref + p + 1) = dom.lo;
      upper(iref + p + 1) = dom.hi;
    }
  }

  Eigen::VectorXd hessian_seed() const {
    Eigen::VectorXd seed = Eigen::VectorXd::Ones(dim);
    const double qn = cfg.Q.cwiseAbs().maxCoeff();
    for (int j = 0; j < Nc; ++j)
      for (int k = 0; k < m; ++k)
        seed(iu(j) + k) = 2.0 * cfg.R(k, k) + 2.0 * Nc * qn;
    for (int k = 0; k < p; ++k)
      seed(iref + k) = 2.0 * cfg.T(k, k) + 2.0 * Nc * qn;
    if (mode == Mode::Normal) {
      seed(iref + p) = 1.0 + 2.0 * Nc * qn;
      seed(iref + p + 1) = 1.0 + 2.0 * Nc * qn;
    }
    return seed;
  }

  // ---- targets and guesses ------------------------------------------------

  Eigen::VectorXd target_theta(const Eigen::VectorXd& y_t) const {
    if (mode == Mode::Standard) return y_t;
    Eigen::VectorXd v;
    try {
      v = ns->chart().to_chart(y_t);
    } catch (const setgeom::undefined_angle_error&) {
      // Target at the chart center: radius 0, any angle tracks equally.
      Eigen::VectorXd q(ns->basis_dims().size());
      for (size_t i = 0; i < ns->basis_region().size(); ++i)
        q(i) = 0.5 * (ns->basis_region()[i].lo + ns->basis_region()[i].hi);
      v = ns->assemble(q, 0.0);
    }
    return setgeom::homeo_inverse_extended(*ns, v, cfg.fiber);
  }

  Eigen::VectorXd cold_ref(const Eigen::VectorXd& x0) const {
    const Eigen::VectorXd y0 = model.h(x0, Eigen::VectorXd::Zero(m));
    if (mode == Mode::Standard) {
      Eigen::VectorXd ys = y0;
      const auto& bb = model.constraints.output_set.bbox();
      for (int k = 0; k < p; ++k)
        ys(k) = std::clamp(ys(k), bb[k].lo, bb[k].hi);
      return ys;
    }
    Eigen::VectorXd theta;
    try {
      theta = target_theta(y0);
    } catch (const setgeom::degenerate_fiber_error&) {
      theta = ns->assemble(
          Eigen::VectorXd::Zero(ns->basis_dims().size()), 0.5);
    }
    const auto& region = ns->basis_region();
    const auto& bd = ns->basis_dims();
    for (size_t i = 0; i < bd.size(); ++i)
      theta(bd[i]) = std::clamp(theta(bd[i]), region[i].lo, region[i].hi);
    theta(ns->fiber_dim()) = std::clamp(theta(ns->fiber_dim()), 0.0, 1.0);
    if (mode == Mode::Homeo) return theta;
    const auto ex =
        setgeom::fiber_extremes(*ns, ns->basis_of(theta), cfg.fiber);
    Eigen::VectorXd ref(nref);
    ref.head(p) = theta;
    ref(p) = ex.lo;
    ref(p + 1) = ex.hi;
    return ref;
  }
};

TrackingMpc::TrackingMpc(std::shared_ptr<const Core> core)
    : core_(std::move(core)) {}

Mode TrackingMpc::mode() const { return core_->mode; }
const MpcConfig& TrackingMpc::config() const { return core_->cfg; }
const plant::PlantModel& TrackingMpc::model() const { return core_->model; }

namespace {

void validate_common(const plant::PlantModel& model, const MpcConfig& cfg) {
  if (model.n <= 0 || model.m <= 0 || model.p <= 0)
    throw std::invalid_argument("TrackingMpc: empty plant dimensions");
  if (cfg.Nc < 1) throw std::invalid_argument("TrackingMpc: Nc must be >= 1");
  if (cfg.Nc > cfg.Np)
    throw std::invalid_argument("TrackingMpc: Nc must not exceed Np");
  if (cfg.Np != cfg.Nc)
    throw std::invalid_argument(
        "TrackingMpc: the terminal-equality formulation requires Np == Nc");
  check_weight(cfg.Q, model.n, "Q", false);
  check_weight(cfg.R, model.m, "R", true);
  check_weight(cfg.T, model.p, "T", true);
  if (!(cfg.delta_eps >= 0.0))
    throw std::invalid_argument("TrackingMpc: delta_eps must be >= 0");
  if (model.constraints.input_lo.size() != model.m ||
      model.constraints.input_hi.size() != model.m)
    throw std::invalid_argument("TrackingMpc: input bound size mismatch");
  if (((model.constraints.input_hi - model.constraints.input_lo).array() < 0.0)
          .any())
    throw std::invalid_argument("TrackingMpc: input bounds are crossed");
}

std::shared_ptr<TrackingMpc::Core> make_core(plant::PlantModel model,
                                             MpcConfig cfg, Mode mode) {
  auto core = std::make_shared<TrackingMpc::Core>();
  core->model = std::move(model);
  core->cfg = std::move(cfg);
  core->mode = mode;
  core->n = core->model.n;
  core->m = core->model.m;
  core->p = core->model.p;
  core->Nc = core->cfg.Nc;
  core->nu = core->m * core->Nc;
  core->nref = core->p + (mode == Mode::Normal ? 2 : 0);
  core->dim = core->nu + core->nref;
  core->iref = core->nu;
  if (mode == Mode::Normal) {
    core->ilam_lo = core->iref + core->p;
    core->ilam_hi = core->ilam_lo + 1;
  }
  return core;
}

}  // namespace

TrackingMpc TrackingMpc::build_standard(plant::PlantModel model,
                                        MpcConfig cfg) {
  validate_common(model, cfg);
  if (!model.constraints.output_set.smooth())
    throw std::invalid_argument(
        "TrackingMpc: the output set must be smooth for optimization; "
        "rebuild it with the smooth blend");
  if (model.constraints.output_set.dim() != model.p)
    throw std::invalid_argument("TrackingMpc: output set dimension mismatch");
  return TrackingMpc(make_core(std::move(model), std::move(cfg),
                               Mode::Standard));
}

namespace {

std::shared_ptr<TrackingMpc::Core> make_transformed_core(
    plant::PlantModel model, setgeom::NormalSetChart ns, MpcConfig cfg,
    std::optional<setgeom::NormalityCertificate> cert, Mode mode) {
  validate_common(model, cfg);
  if (ns.dim() != model.p)
    throw std::invalid_argument(
        "TrackingMpc: reference set dimension mismatch");
  if (!ns.chart_set().smooth())
    throw std::invalid_argument(
        "TrackingMpc: the reference set must be smooth for optimization; "
        "rebuild it with the smooth blend");
  if (mode == Mode::Normal && !(cfg.epsilon_lambda > 0.0))
    throw std::invalid_argument("TrackingMpc: epsilon_lambda must be > 0");

  setgeom::NormalityCertificate c =
      cert ? *cert : setgeom::certify_normality(ns);
  if (!c.ok)
    throw std::invalid_argument("TrackingMpc: set failed the fiber check: " +
                                c.detail);
  if (c.lower_mixed || c.upper_mixed)
    throw std::invalid_argument(
        "TrackingMpc: fiber extremes switch between the set boundary and "
        "the fiber-domain edge across basis points; this layout is not "
        "supported");

  auto core = make_core(std::move(model), std::move(cfg), mode);
  core->ns = std::move(ns);
  core->lower_pin_at_domain = c.lower_at_domain;
  core->upper_pin_at_domain = c.upper_at_domain;
  return core;
}

}  // namespace

TrackingMpc TrackingMpc::build_normal(
    plant::PlantModel model, setgeom::NormalSetChart ns, MpcConfig cfg,
    std::optional<setgeom::NormalityCertificate> cert) {
  return TrackingMpc(make_transformed_core(std::move(model), std::move(ns),
                                           std::move(cfg), std::move(cert),
                                           Mode::Normal));
}

TrackingMpc TrackingMpc::build_homeo(
    plant::PlantModel model, setgeom::NormalSetChart ns, MpcConfig cfg,
    std::optional<setgeom::NormalityCertificate> cert) {
  return TrackingMpc(make_transformed_core(std::move(model), std::move(ns),
                                           std::move(cfg), std::move(cert),
                                           Mode::Homeo));
}

Eigen::VectorXd TrackingMpc::target_theta(const Eigen::VectorXd& y_t) const {
  if (y_t.size() != core_->p)
    throw std::invalid_argument("TrackingMpc: target has wrong dimension");
  return core_->target_theta(y_t);
}

nlp::NlpProblem TrackingMpc::transcribe(const MpcQuery& query) const {
  const auto& c = *core_;
  if (query.x.size() != c.n)
    throw std::invalid_argument("TrackingMpc: state has wrong dimension");
  if (query.y_t.size() != c.p)
    throw std::invalid_argument("TrackingMpc: target has wrong dimension");
  if (!query.x.allFinite() || !query.y_t.allFinite())
    throw std::invalid_argument("TrackingMpc: non-finite query");

  // Shared by every callback: the core plus per-query data.
  struct Bound {
    std::shared_ptr<const Core> core;
    Eigen::VectorXd x0;
    Eigen::VectorXd target_ref;
  };
  auto bound = std::make_shared<const Bound>(Bound{
      core_, query.x,
      c.mode == Mode::Standard ? query.y_t : c.target_theta(query.y_t)});

  nlp::NlpProblem prob;
  prob.dim = c.dim;
  prob.cost = [bound](const Eigen::VectorXd& z) {
    return bound->core->cost_value(bound->x0, z, bound->target_ref);
  };
  prob.cost_grad = [bound](const Eigen::VectorXd& z) {
    return bound->core->cost_gradient(bound->x0, z, bound->target_ref);
  };
  prob.eq.size = c.eq_rows();
  prob.eq.value = [bound](const Eigen::VectorXd& z) {
    return bound->core->eq_values(bound->x0, z);
  };
  prob.eq.jacobian = [bound](const Eigen::VectorXd& z) {
    return bound->core->eq_jacobian(bound->x0, z);
  };
  prob.ineq.size = c.ineq_rows();
  prob.ineq.value = [bound](const Eigen::VectorXd& z) {
    return bound->core->ineq_values(bound->x0, z);
  };
  prob.ineq.jacobian = [bound](const Eigen::VectorXd& z) {
    return bound->core->ineq_jacobian(bound->x0, z);
  };
  c.fill_bounds(prob.lower, prob.upper);
  prob.hessian_seed = c.hessian_seed();
  return prob;
}

Eigen::VectorXd TrackingMpc::initial_guess(const MpcQuery& query) const {
  const auto& c = *core_;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(c.dim);
  if (query.warm.valid && query.warm.u_seq.rows() == c.m &&
      query.warm.u_seq.cols() == c.Nc && query.warm.ref.size() == c.nref) {
    // Shift the plan one step, repeat the tail input, keep the reference.
    for (int j = 0; j < c.Nc - 1; ++j)
      z.segment(c.iu(j), c.m) = query.warm.u_seq.col(j + 1);
    z.segment(c.iu(c.Nc - 1), c.m) = query.warm.u_seq.col(c.Nc - 1);
    z.segment(c.iref, c.nref) = query.warm.ref;
  } else {
    z.segment(c.iref, c.nref) = c.cold_ref(query.x);
  }
  for (int j = 0; j < c.Nc; ++j)
    z.segment(c.iu(j), c.m) =
        z.segment(c.iu(j), c.m)
            .cwiseMax(c.model.constraints.input_lo)
            .cwiseMin(c.model.constraints.input_hi);
  return z;
}

MpcResult TrackingMpc::solve_step(const MpcQuery& query) const {
  const auto& c = *core_;
  const nlp::NlpProblem prob = transcribe(query);
  const Eigen::VectorXd z0 = initial_guess(query);

  MpcResult res;
  res.nlp = nlp::solve(prob, z0, c.cfg.solver);
  const Eigen::VectorXd& z = res.nlp.z;

  res.u_seq.resize(c.m, c.Nc);
  for (int j = 0; j < c.Nc; ++j)
    res.u_seq.col(j) = z.segment(c.iu(j), c.m)
                           .cwiseMax(c.model.constraints.input_lo)
                           .cwiseMin(c.model.constraints.input_hi);
  res.u0 = res.u_seq.col(0);
  res.y_s = c.ys_of(z);
  res.cost = res.nlp.cost;
  res.feasible = res.nlp.status != nlp::SolveStatus::NumericalFailure &&
                 res.nlp.max_violation <= 1e-6;

  if (c.mode != Mode::Standard) {
    res.theta = z.segment(c.iref, c.p);
    if (c.mode == Mode::Normal) {
      res.lambda_lo = z(c.ilam_lo);
      res.lambda_hi = z(c.ilam_hi);
    } else {
      const auto ex = setgeom::fiber_extremes(
          *c.ns, c.ns->basis_of(res.theta), c.cfg.fiber);
      res.lambda_lo = ex.lo;
      res.lambda_hi = ex.hi;
    }
  }

  res.next_warm.u_seq = res.u_seq;
  res.next_warm.ref = z.segment(c.iref, c.nref);
  res.next_warm.valid = true;
  return res;
}

OffsetOptimum offset_optimum(const setgeom::NormalSetChart& ns,
                             const Eigen::VectorXd& y_t,
                             const Eigen::MatrixXd& T,
                             const setgeom::FiberOptions& fiber) {
  const int p = ns.dim();
  if (y_t.size() != p)
    throw std::invalid_argument("offset_optimum: target has wrong dimension");
  check_weight(T, p, "T", true);

  Eigen::VectorXd theta_t;
  try {
    theta_t = setgeom::homeo_inverse_extended(ns, ns.chart().to_chart(y_t),
                                              fiber);
  } catch (const setgeom::undefined_angle_error&) {
    Eigen::VectorXd q(ns.basis_dims().size());
    for (size_t i = 0; i < ns.basis_region().size(); ++i)
      q(i) = 0.5 * (ns.basis_region()[i].lo + ns.basis_region()[i].hi);
    theta_t = setgeom::homeo_inverse_extended(ns, ns.assemble(q, 0.0), fiber);
  }

  Eigen::VectorXd lo(p), hi(p);
  const auto& region = ns.basis_region();
  const auto& bd = ns.basis_dims();
  for (size_t i = 0; i < bd.size(); ++i) {
    lo(bd[i]) = region[i].lo;
    hi(bd[i]) = region[i].hi;
  }
  lo(ns.fiber_dim()) = 0.0;
  hi(ns.fiber_dim()) = 1.0;

  OffsetOptimum out;
  const double offdiag =
      (T - Eigen::MatrixXd(T.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
  if (offdiag <= 1e-14 * T.cwiseAbs().maxCoeff()) {
    out.theta = theta_t.cwiseMax(lo).cwiseMin(hi);
  } else {
    nlp::NlpProblem prob;
    prob.dim = p;
    prob.cost = [T, theta_t](const Eigen::VectorXd& th) {
      const Eigen::VectorXd e = th - theta_t;
      return e.dot(T * e);
    };
    prob.cost_grad = [T, theta_t](const Eigen::VectorXd& th) {
      return Eigen::VectorXd(2.0 * (T * (th - theta_t)));
    };
    prob.lower = lo;
    prob.upper = hi;
    prob.hessian_seed = 2.0 * T.diagonal();
    const auto sol = nlp::solve(prob, theta_t.cwiseMax(lo).cwiseMin(hi));
    out.theta = sol.z;
  }
  out.y = ns.chart().from_chart(setgeom::homeo_forward(ns, out.theta, fiber));
  return out;
}

}  // namespace mpct
