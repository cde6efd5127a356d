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

#include "nlp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "active_set_qp.hpp"

namespace nlp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd fd_grad(const CostFn& f, const Eigen::VectorXd& z, double h0) {
  Eigen::VectorXd g(z.size());
  Eigen::VectorXd zp = z;
  for (int i = 0; i < z.size(); ++i) {
    const double h = h0 * std::max(1.0, std::abs(z(i)));
    zp(i) = z(i) + h;
    const double fp = f(zp);
    zp(i) = z(i) - h;
    const double fm = f(zp);
    zp(i) = z(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd fd_jac(const VecFn& f, const Eigen::VectorXd& z, int rows,
                       double h0) {
  Eigen::MatrixXd J(rows, z.size());
  Eigen::VectorXd zp = z;
  for (int i = 0; i < z.size(); ++i) {
    const double h = h0 * std::max(1.0, std::abs(z(i)));
    zp(i) = z(i) + h;
    const Eigen::VectorXd fp = f(zp);
    zp(i) = z(i) - h;
    const Eigen::VectorXd fm = f(zp);
    zp(i) = z(i);
    J.col(i) = (fp - fm) / (2.0 * h);
  }
  return J;
}

struct Vals {
  double f = 0.0;
  Eigen::VectorXd ce, ci;
  bool finite = false;
};

struct Jacs {
  Eigen::VectorXd g;
  Eigen::MatrixXd Je, Ji;
  bool finite = false;
};

class Adapter {
 public:
  Adapter(const NlpProblem& p, double fd_step) : p_(p), h_(fd_step) {
    ne_ = p.eq.value ? p.eq.size : 0;
    ni_ = p.ineq.value ? p.ineq.size : 0;
  }

  int ne() const { return ne_; }
  int ni() const { return ni_; }

  Vals values(const Eigen::VectorXd& z) const {
    Vals v;
    v.f = p_.cost(z);
    v.ce = ne_ ? p_.eq.value(z) : Eigen::VectorXd(0);
    v.ci = ni_ ? p_.ineq.value(z) : Eigen::VectorXd(0);
    v.finite = std::isfinite(v.f) && v.ce.allFinite() && v.ci.allFinite();
    return v;
  }

  Jacs jacobians(const Eigen::VectorXd& z) const {
    Jacs j;
    j.g = p_.cost_grad ? p_.cost_grad(z) : fd_grad(p_.cost, z, h_);
    j.Je = ne_ ? (p_.eq.jacobian ? p_.eq.jacobian(z)
                                 : fd_jac(p_.eq.value, z, ne_, h_))
               : Eigen::MatrixXd(0, p_.dim);
    j.Ji = ni_ ? (p_.ineq.jacobian ? p_.ineq.jacobian(z)
                                   : fd_jac(p_.ineq.value, z, ni_, h_))
               : Eigen::MatrixXd(0, p_.dim);
    j.finite = j.g.allFinite() && j.Je.allFinite() && j.Ji.allFinite();
    return j;
  }

 private:
  const NlpProblem& p_;
  double h_;
  int ne_ = 0, ni_ = 0;
};

double l1_violation(const Vals& v) {
  double s = 0.0;
  for (int i = 0; i < v.ce.size(); ++i) s += std::abs(v.ce(i));
  for (int i = 0; i < v.ci.size(); ++i) s += std::max(0.0, -v.ci(i));
  return s;
}

double max_violation_of(const Vals& v) {
  double s = 0.0;
  for (int i = 0; i < v.ce.size(); ++i) s = std::max(s, std::abs(v.ce(i)));
  for (int i = 0; i < v.ci.size(); ++i) s = std::max(s, -v.ci(i));
  return std::max(s, 0.0);
}

struct Bounds {
  std::vector<int> lo, hi;  // indices with finite bounds
};

Bounds finite_bounds(const NlpProblem& p) {
  Bounds b;
  for (int i = 0; i < p.lower.size(); ++i)
    if (p.lower(i) > -kInf) b.lo.push_back(i);
  for (int i = 0; i < p.upper.size(); ++i)
    if (p.upper(i) < kInf) b.hi.push_back(i);
  return b;
}

struct StepResult {
  bool ok = false;
  Eigen::VectorXd d;
  Eigen::VectorXd lam_eq, lam_in, lam_lo, lam_hi;  // NLP-sized
  double slack_peak = 0.0;  // elastic relaxation actually used
  bool elastic = false;
};

// Direction via the plain QP when the linearization admits a feasible
// start, elastic otherwise.
class StepSolver {
 public:
  StepSolver(int n, const Bounds& bounds, const NlpProblem& p)
      : n_(n), bounds_(bounds), p_(p) {}

  StepResult plain(const Eigen::MatrixXd& B, const Jacs& j, const Vals& v,
                   const Eigen::VectorXd& z) const {
    StepResult out;
    const int ne = static_cast<int>(v.ce.size());
    const int ni = static_cast<int>(v.ci.size());

    Eigen::VectorXd d0 = Eigen::VectorXd::Zero(n_);
    if (ne > 0) {
      d0 = j.Je.completeOrthogonalDecomposition().solve(-v.ce);
      const double resid = (j.Je * d0 + v.ce).lpNorm<Eigen::Infinity>();
      if (!(resid <= 1e-9 * (1.0 + v.ce.lpNorm<Eigen::Infinity>()))) return out;
    }

    detail::QpProblem qp;
    qp.H = B;
    qp.g = j.g;
    qp.Aeq = j.Je;
    qp.beq = -v.ce;
    const int mi = ni + static_cast<int>(bounds_.lo.size() + bounds_.hi.size());
    qp.Ain = Eigen::MatrixXd::Zero(mi, n_);
    qp.bin = Eigen::VectorXd::Zero(mi);
    int r = 0;
    if (ni > 0) {
      qp.Ain.topRows(ni) = j.Ji;
      qp.bin.head(ni) = -v.ci;
      r = ni;
    }
    for (int i : bounds_.lo) {
      qp.Ain(r, i) = 1.0;
      qp.bin(r) = p_.lower(i) - z(i);
      ++r;
    }
    for (int i : bounds_.hi) {
      qp.Ain(r, i) = -1.0;
      qp.bin(r) = z(i) - p_.upper(i);
      ++r;
    }

    // The start must already satisfy every inequality row (to QP slack).
    const Eigen::VectorXd resid_in = qp.Ain * d0 - qp.bin;
    const double in_tol =
        1e-11 * (1.0 + (qp.bin.size()
                            ? qp.bin.cwiseAbs().maxCoeff()
                            : 0.0));
    if (resid_in.size() > 0 && resid_in.minCoeff() < -in_tol) return out;

    const detail::QpResult qr = detail::solve_qp(qp, d0);
    if (!qr.ok) return out;
    out.ok = true;
    out.d = qr.x;
    out.lam_eq = qr.lam_eq;
    out.lam_in = ni ? qr.lam_in.head(ni) : Eigen::VectorXd(0);
    scatter_bound_multipliers(qr.lam_in, ni, out);
    return out;
  }

  StepResult elastic(const Eigen::MatrixXd& B, const Jacs& j, const Vals& v,
                     const Eigen::VectorXd& z, double mu) const {
    StepResult out;
    out.elastic = true;
    const int ne = static_cast<int>(v.ce.size());
    const int ni = static_cast<int>(v.ci.size());
    const int ns = 2 * ne + ni;
    const int nv = n_ + ns;
    const double delta = 1e-8 * std::max(1.0, mu);
    // Step box: the penalty gradient can dwarf the quasi-Newton curvature,
    // sending the unrestricted minimizer astronomically far; a generous
    // trust region keeps the subproblem bounded without binding the steps
    // the line search could actually accept.
    const double radius = 10.0 * (1.0 + z.lpNorm<Eigen::Infinity>());

    detail::QpProblem qp;
    qp.H = Eigen::MatrixXd::Zero(nv, nv);
    qp.H.topLeftCorner(n_, n_) = B;
    qp.H.bottomRightCorner(ns, ns) =
        delta * Eigen::MatrixXd::Identity(ns, ns);
    qp.g = Eigen::VectorXd::Constant(nv, mu);
    qp.g.head(n_) = j.g;

    qp.Aeq = Eigen::MatrixXd::Zero(ne, nv);
    qp.beq = -v.ce;
    if (ne > 0) {
      qp.Aeq.leftCols(n_) = j.Je;
      qp.Aeq.block(0, n_, ne, ne) = -Eigen::MatrixXd::Identity(ne, ne);
      qp.Aeq.block(0, n_ + ne, ne, ne) = Eigen::MatrixXd::Identity(ne, ne);
    }

    const int nbound = static_cast<int>(bounds_.lo.size() + bounds_.hi.size());
    const int mi = ni + nbound + ns + 2 * n_;
    qp.Ain = Eigen::MatrixXd::Zero(mi, nv);
    qp.bin = Eigen::VectorXd::Zero(mi);
    int r = 0;
    if (ni > 0) {
      qp.Ain.block(0, 0, ni, n_) = j.Ji;
      qp.Ain.block(0, n_ + 2 * ne, ni, ni) =
          Eigen::MatrixXd::Identity(ni, ni);
      qp.bin.head(ni) = -v.ci;
      r = ni;
    }
    for (int i : bounds_.lo) {
      qp.Ain(r, i) = 1.0;
      qp.bin(r) = p_.lower(i) - z(i);
      ++r;
    }
    for (int i : bounds_.hi) {
      qp.Ain(r, i) = -1.0;
      qp.bin(r) = z(i) - p_.upper(i);
      ++r;
    }
    for (int k = 0; k < ns; ++k) {
      qp.Ain(r, n_ + k) = 1.0;
      qp.bin(r) = 0.0;
      ++r;
    }
    for (int i = 0; i < n_; ++i) {
      qp.Ain(r, i) = 1.0;
      qp.bin(r) = -radius;
      ++r;
      qp.Ain(r, i) = -1.0;
      qp.bin(r) = -radius;
      ++r;
    }

    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(nv);
    for (int i = 0; i < ne; ++i) {
      x0(n_ + i) = std::max(v.ce(i), 0.0);
      x0(n_ + ne + i) = std::max(-v.ce(i), 0.0);
    }
    for (int i = 0; i < ni; ++i) x0(n_ + 2 * ne + i) = std::max(-v.ci(i), 0.0);

    const detail::QpResult qr = detail::solve_qp(qp, x0);
    if (!qr.ok) return out;
    out.ok = true;
    out.d = qr.x.head(n_);
    out.slack_peak =
        ns > 0 ? qr.x.tail(ns).lpNorm<Eigen::Infinity>() : 0.0;
    out.lam_eq = qr.lam_eq;
    out.lam_in = ni ? qr.lam_in.head(ni) : Eigen::VectorXd(0);
    scatter_bound_multipliers(qr.lam_in, ni, out);
    return out;
  }

 private:
  void scatter_bound_multipliers(const Eigen::VectorXd& lam_rows, int ni,
                                 StepResult& out) const {
    out.lam_lo = Eigen::VectorXd::Zero(n_);
    out.lam_hi = Eigen::VectorXd::Zero(n_);
    int r = ni;
    for (int i : bounds_.lo) out.lam_lo(i) = lam_rows(r++);
    for (int i : bounds_.hi) out.lam_hi(i) = lam_rows(r++);
  }

  int n_;
  const Bounds& bounds_;
  const NlpProblem& p_;
};

double stationarity(const Jacs& j, const StepResult& s) {
  Eigen::VectorXd r = j.g;
  if (s.lam_eq.size()) r -= j.Je.transpose() * s.lam_eq;
  if (s.lam_in.size()) r -= j.Ji.transpose() * s.lam_in;
  r -= s.lam_lo;
  r += s.lam_hi;
  return r.lpNorm<Eigen::Infinity>();
}

double complementarity(const NlpProblem& p, const Eigen::VectorXd& z,
                       const Vals& v, const StepResult& s) {
  double c = 0.0;
  for (int i = 0; i < s.lam_in.size(); ++i)
    c = std::max(c, std::abs(s.lam_in(i) * v.ci(i)));
  for (int i = 0; i < s.lam_lo.size(); ++i)
    if (s.lam_lo(i) != 0.0)
      c = std::max(c, std::abs(s.lam_lo(i) * (z(i) - p.lower(i))));
  for (int i = 0; i < s.lam_hi.size(); ++i)
    if (s.lam_hi(i) != 0.0)
      c = std::max(c, std::abs(s.lam_hi(i) * (p.upper(i) - z(i))));
  return c;
}

Eigen::VectorXd clip_to_box(const NlpProblem& p, Eigen::VectorXd z) {
  if (p.lower.size()) z = z.cwiseMax(p.lower);
  if (p.upper.size()) z = z.cwiseMin(p.upper);
  return z;
}

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::MaxIterations:
      return "max_iterations";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::NumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

NlpSolution solve(const NlpProblem& problem, const Eigen::VectorXd& z0,
                  const SolverOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  NlpSolution sol;
  const int n = problem.dim;
  if (n <= 0 || z0.size() != n)
    throw std::invalid_argument("nlp::solve: bad problem dimension");
  if ((problem.lower.size() && problem.lower.size() != n) ||
      (problem.upper.size() && problem.upper.size() != n))
    throw std::invalid_argument("nlp::solve: bound size mismatch");

  const Adapter fns(problem, options.fd_step);
  const Bounds bounds = finite_bounds(problem);
  const StepSolver steps(n, bounds, problem);

  Eigen::VectorXd z = clip_to_box(problem, z0);
  Vals v = fns.values(z);
  Jacs j = v.finite ? fns.jacobians(z) : Jacs{};

  auto finish = [&](SolveStatus st, const StepResult* s) {
    sol.status = st;
    sol.z = z;
    sol.cost = v.f;
    sol.max_violation = max_violation_of(v);
    if (s != nullptr && s->ok) {
      sol.lam_eq = s->lam_eq;
      sol.lam_in = s->lam_in;
      sol.lam_lo = s->lam_lo;
      sol.lam_hi = s->lam_hi;
    } else {
      sol.lam_eq = Eigen::VectorXd::Zero(fns.ne());
      sol.lam_in = Eigen::VectorXd::Zero(fns.ni());
      sol.lam_lo = Eigen::VectorXd::Zero(n);
      sol.lam_hi = Eigen::VectorXd::Zero(n);
    }
    const auto t_end = std::chrono::steady_clock::now();
    sol.solve_time = std::max(
        1e-9, std::chrono::duration<double>(t_end - t_start).count());
    return sol;
  };

  if (!v.finite || !j.finite) return finish(SolveStatus::NumericalFailure, nullptr);

  Eigen::VectorXd seed = problem.hessian_seed.size() == n
                             ? problem.hessian_seed
                             : Eigen::VectorXd::Ones(n);
  seed = seed.cwiseMax(1e-8).cwiseMin(1e12);
  Eigen::MatrixXd B = seed.asDiagonal();

  double mu = options.mu_init;
  int resets = 0;
  int tiny_steps = 0;
  StepResult last_step;

  for (int it = 0; it < options.max_iter; ++it) {
    sol.iterations = it;

    StepResult s = steps.plain(B, j, v, z);
    bool lin_infeasible = false;
    if (!s.ok) {
      for (int bump = 0; bump < 6; ++bump) {
        s = steps.elastic(B, j, v, z, mu);
        if (!s.ok) break;
        const double slack_tol =
            1e-8 * (1.0 + v.ce.lpNorm<Eigen::Infinity>() +
                    (v.ci.size() ? v.ci.lpNorm<Eigen::Infinity>() : 0.0));
        if (s.slack_peak <= slack_tol) break;
        if (mu >= options.mu_max) {
          lin_infeasible = true;
          break;
        }
        mu = std::min(mu * 10.0, options.mu_max);
      }
    }
    if (!s.ok) {
      if (resets == 0) {  // one quasi-Newton reset before giving up
        B = seed.asDiagonal();
        ++resets;
        continue;
      }
      // A dead subproblem at a feasible iterate still leaves a usable
      // plan; report the iterate honestly instead of erasing it.
      if (max_violation_of(v) <= options.feas_tol)
        return finish(SolveStatus::MaxIterations, &last_step);
      return finish(SolveStatus::NumericalFailure, nullptr);
    }
    last_step = s;

    const double viol0 = l1_violation(v);
    const double viol_max = max_violation_of(v);
    const double stat = stationarity(j, s);
    const double comp = complementarity(problem, z, v, s);
    const double kkt = std::max(stat, comp);

    double lam_peak = 0.0;
    if (s.lam_eq.size())
      lam_peak = std::max(lam_peak, s.lam_eq.lpNorm<Eigen::Infinity>());
    if (s.lam_in.size())
      lam_peak = std::max(lam_peak, s.lam_in.lpNorm<Eigen::Infinity>());
    const double kkt_scale = 1.0 + std::max(j.g.lpNorm<Eigen::Infinity>(),
                                            lam_peak);

    // Converged when the KKT residual clears, or when feasible and the
    // iterate has stopped moving (steps at the rounding floor cannot
    // sharpen the multiplier estimate any further).
    if (viol_max <= options.feas_tol &&
        (kkt <= options.tol * kkt_scale || tiny_steps >= 3)) {
      sol.kkt_residual = kkt;
      return finish(SolveStatus::Optimal, &s);
    }

    if (lin_infeasible &&
        s.d.lpNorm<Eigen::Infinity>() <= 1e-8 * (1.0 + z.lpNorm<Eigen::Infinity>())) {
      sol.kkt_residual = kkt;
      return finish(SolveStatus::Infeasible, &s);
    }

    // Exact-penalty weight must dominate the multipliers.
    const double mu_need = 1.1 * lam_peak + 1e-3;
    if (mu < mu_need) mu = mu_need;

    // Directional derivative of the merit along d.
    Eigen::VectorXd ce_lin = v.ce;
    if (fns.ne()) ce_lin += j.Je * s.d;
    Eigen::VectorXd ci_lin = v.ci;
    if (fns.ni()) ci_lin += j.Ji * s.d;
    double viol_lin = 0.0;
    for (int i = 0; i < ce_lin.size(); ++i) viol_lin += std::abs(ce_lin(i));
    for (int i = 0; i < ci_lin.size(); ++i)
      viol_lin += std::max(0.0, -ci_lin(i));
    const double dphi = j.g.dot(s.d) + mu * (viol_lin - viol0);

    const double merit0 = v.f + mu * viol0;
    if (!(dphi < -1e-14 * (1.0 + std::abs(merit0)))) {
      if (viol_max > options.feas_tol && mu < options.mu_max) {
        mu = std::min(mu * 10.0, options.mu_max);
        continue;
      }
      if (resets == 0) {
        B = seed.asDiagonal();
        ++resets;
        continue;
      }
      sol.kkt_residual = kkt;
      return finish(SolveStatus::MaxIterations, &s);
    }

    double alpha = 1.0;
    Vals v_trial;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Eigen::VectorXd zt = clip_to_box(problem, z + alpha * s.d);
      v_trial = fns.values(zt);
      if (v_trial.finite &&
          v_trial.f + mu * l1_violation(v_trial) <=
              merit0 + 1e-4 * alpha * dphi) {
        z = zt;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (resets == 0) {
        B = seed.asDiagonal();
        ++resets;
        continue;
      }
      sol.kkt_residual = kkt;
      return finish(SolveStatus::MaxIterations, &s);
    }

    const double step_inf = alpha * s.d.lpNorm<Eigen::Infinity>();
    if (step_inf <= 1e-13 * (1.0 + z.lpNorm<Eigen::Infinity>()))
      ++tiny_steps;
    else
      tiny_steps = 0;

    const Jacs j_new = fns.jacobians(z);
    if (!j_new.finite) return finish(SolveStatus::NumericalFailure, &s);

    if (options.record_history) {
      IterationRecord rec;
      rec.merit_before = merit0;
      rec.merit_after = v_trial.f + mu * l1_violation(v_trial);
      rec.mu = mu;
      rec.alpha = alpha;
      rec.kkt = kkt;
      rec.step_norm = alpha * s.d.norm();
      sol.history.push_back(rec);
    }

    // Damped quasi-Newton update on the Lagrangian gradient difference.
    const Eigen::VectorXd step_vec = alpha * s.d;
    auto lag_grad = [&](const Jacs& jj) {
      Eigen::VectorXd r = jj.g;
      if (s.lam_eq.size()) r -= jj.Je.transpose() * s.lam_eq;
      if (s.lam_in.size()) r -= jj.Ji.transpose() * s.lam_in;
      return r;
    };
    const Eigen::VectorXd yvec = lag_grad(j_new) - lag_grad(j);
    const Eigen::VectorXd Bs = B * step_vec;
    const double sBs = step_vec.dot(Bs);
    const double sy = step_vec.dot(yvec);
    if (sBs > 1e-16 && step_vec.lpNorm<Eigen::Infinity>() > 1e-14) {
      Eigen::VectorXd yeff = yvec;
      if (sy < 0.2 * sBs) {
        const double tau = 0.8 * sBs / (sBs - sy);
        yeff = tau * yvec + (1.0 - tau) * Bs;
      }
      const double sy_eff = step_vec.dot(yeff);
      if (sy_eff > 1e-16)
        B += (yeff * yeff.transpose()) / sy_eff -
             (Bs * Bs.transpose()) / sBs;
    }

    v = fns.values(z);
    j = j_new;
    sol.kkt_residual = kkt;
  }

  sol.iterations = options.max_iter;
  return finish(SolveStatus::MaxIterations,
                last_step.ok ? &last_step : nullptr);
}

double check_gradients(const NlpProblem& problem, const Eigen::VectorXd& z,
                       double fd_step) {
  double worst = 0.0;
  auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::abs(b));
  };
  if (problem.cost_grad) {
    const Eigen::VectorXd ga = problem.cost_grad(z);
    const Eigen::VectorXd gf = fd_grad(problem.cost, z, fd_step);
    for (int i = 0; i < z.size(); ++i) worst = std::max(worst, rel(ga(i), gf(i)));
  }
  if (problem.eq.value && problem.eq.jacobian) {
    const Eigen::MatrixXd Ja = problem.eq.jacobian(z);
    const Eigen::MatrixXd Jf = fd_jac(problem.eq.value, z, problem.eq.size, fd_step);
    for (int r = 0; r < Ja.rows(); ++r)
      for (int c = 0; c < Ja.cols(); ++c)
        worst = std::max(worst, rel(Ja(r, c), Jf(r, c)));
  }
  if (problem.ineq.value && problem.ineq.jacobian) {
    const Eigen::MatrixXd Ja = problem.ineq.jacobian(z);
    const Eigen::MatrixXd Jf =
        fd_jac(problem.ineq.value, z, problem.ineq.size, fd_step);
    for (int r = 0; r < Ja.rows(); ++r)
      for (int c = 0; c < Ja.cols(); ++c)
        worst = std::max(worst, rel(Ja(r, c), Jf(r, c)));
  }
  return worst;
}

double kkt_residual(const NlpProblem& problem, const Eigen::VectorXd& z,
                    const Eigen::VectorXd& lam_eq, const Eigen::VectorXd& lam_in,
                    const Eigen::VectorXd& lam_lo, const Eigen::VectorXd& lam_hi,
                    double fd_step) {
  const Adapter fns(problem, fd_step);
  const Vals v = fns.values(z);
  const Jacs j = fns.jacobians(z);
  StepResult s;
  s.ok = true;
  s.lam_eq = lam_eq;
  s.lam_in = lam_in;
  s.lam_lo = lam_lo.size() ? lam_lo : Eigen::VectorXd::Zero(z.size());
  s.lam_hi = lam_hi.size() ? lam_hi : Eigen::VectorXd::Zero(z.size());
  const double stat = stationarity(j, s);
  const double comp = complementarity(problem, z, v, s);
  return std::max(stat, comp);
}

}  // namespace nlp
