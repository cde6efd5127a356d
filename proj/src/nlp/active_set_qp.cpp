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

#include "active_set_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace nlp::detail {

namespace {

// Null-space solver for the working-set subproblem.  A rank-revealing QR
// of the stacked constraint rows tolerates dependent sets, and the
// reduced Hessian never squares the conditioning the way a Schur
// complement of an ill-conditioned H would.
struct KktSolver {
  Eigen::MatrixXd A;  // stacked [Aeq; Ain_W]
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;  // of A'
  Eigen::MatrixXd Z;   // orthonormal null-space basis of A
  Eigen::MatrixXd Hz;  // Z' H Z
  Eigen::LDLT<Eigen::MatrixXd> hz;

  bool factor_working_set(const Eigen::MatrixXd& H,
                          const Eigen::MatrixXd& Aeq,
                          const Eigen::MatrixXd& Ain,
                          const std::vector<int>& W) {
    const int me = static_cast<int>(Aeq.rows());
    const int nw = me + static_cast<int>(W.size());
    const int n = static_cast<int>(H.rows());
    A.resize(nw, n);
    if (me > 0) A.topRows(me) = Aeq;
    for (size_t i = 0; i < W.size(); ++i) A.row(me + i) = Ain.row(W[i]);
    if (nw == 0) {
      Z = Eigen::MatrixXd::Identity(n, n);
    } else {
      qr.compute(A.transpose());
      const Eigen::MatrixXd Q = qr.householderQ();
      Z = Q.rightCols(n - qr.rank());
    }
    if (Z.cols() == 0) {
      Hz.resize(0, 0);
      return true;
    }
    Hz = Z.transpose() * H * Z;
    hz.compute(Hz);
    return hz.info() == Eigen::Success;
  }

  // EQP step from x: returns (p, lambda) with H p + c = A' lambda,
  // A p = 0, where c = Hx + g.  The reduced solve is refined until its
  // residual sits at rounding level; without that the pivoting loop
  // creeps through thousands of tiny steps on ill-conditioned data.
  void step(const Eigen::MatrixXd& H, const Eigen::VectorXd& c,
            Eigen::VectorXd& p, Eigen::VectorXd& lambda) const {
    if (Z.cols() == 0) {
      p = Eigen::VectorXd::Zero(c.size());
    } else {
      const Eigen::VectorXd cz = Z.transpose() * c;
      Eigen::VectorXd pz = -hz.solve(cz);
      const double cs = cz.lpNorm<Eigen::Infinity>() + 1e-300;
      for (int pass = 0; pass < 3; ++pass) {
        const Eigen::VectorXd r = cz + Hz * pz;
        if (r.lpNorm<Eigen::Infinity>() <= 1e-14 * cs) break;
        pz -= hz.solve(r);
      }
      p = Z * pz;
    }
    if (A.rows() == 0) {
      lambda.resize(0);
      return;
    }
    lambda = qr.solve(c + H * p);  // least-squares stationarity fit
  }
};

QpResult solve_scaled(const QpProblem& qp, const Eigen::VectorXd& x0,
                      int max_iter) {
  const int me = static_cast<int>(qp.Aeq.rows());
  const int mi = static_cast<int>(qp.Ain.rows());
  if (max_iter <= 0) max_iter = 50 * (mi + me + 5);

  QpResult res;
  res.x = x0;
  res.lam_eq = Eigen::VectorXd::Zero(me);
  res.lam_in = Eigen::VectorXd::Zero(mi);

  KktSolver kkt;

  // Initial working set: inequality rows active at x0.
  std::vector<int> W;
  std::vector<char> inW(mi, 0);
  for (int i = 0; i < mi; ++i) {
    const double r = qp.Ain.row(i).dot(res.x) - qp.bin(i);
    if (std::abs(r) <= 1e-11 * (1.0 + std::abs(qp.bin(i)))) {
      W.push_back(i);
      inW[i] = 1;
    }
  }

  // Anti-cycling state: an objective that stagnates switches the drop
  // rule to least-index selection, which breaks degenerate cycles.
  int stagnation = 0;
  const int stall_limit = mi + me + 5;
  double q_best = std::numeric_limits<double>::infinity();

  auto refactor = [&]() -> bool {
    // The rank-revealing factorization tolerates dependent rows; a hard
    // failure can only come from the reduced Hessian, so shed the most
    // recent rows as a last resort.
    while (!kkt.factor_working_set(qp.H, qp.Aeq, qp.Ain, W)) {
      if (W.empty()) return false;
      inW[W.back()] = 0;
      W.pop_back();
    }
    return true;
  };
  if (!refactor()) return res;

  Eigen::VectorXd p, lambda;
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    const Eigen::VectorXd c = qp.H * res.x + qp.g;
    kkt.step(qp.H, c, p, lambda);
    if (!p.allFinite() || !lambda.allFinite()) return res;

    const double q_now = 0.5 * res.x.dot(c + qp.g);
    if (!std::isfinite(q_best) ||
        q_now < q_best - 1e-12 * (1.0 + std::abs(q_best))) {
      q_best = q_now;
      stagnation = 0;
    } else {
      ++stagnation;
    }

    const double pscale = 1.0 + res.x.lpNorm<Eigen::Infinity>();
    bool stationary = p.lpNorm<Eigen::Infinity>() <= 1e-11 * pscale;
    if (!stationary) {
      // With badly scaled data (huge penalty gradients) the computed step
      // bottoms out at rounding noise above the absolute threshold; then
      // judge stationarity on the gradient residual at its own scale.
      Eigen::VectorXd alam = Eigen::VectorXd::Zero(c.size());
      if (lambda.size() > 0) alam.noalias() = kkt.A.transpose() * lambda;
      const double rscale = 1.0 + std::max(c.lpNorm<Eigen::Infinity>(),
                                           alam.lpNorm<Eigen::Infinity>());
      stationary = (c - alam).lpNorm<Eigen::Infinity>() <= 1e-11 * rscale;
    }
    if (stationary) {
      // Stationary on the working set; check inequality multipliers.  A
      // stalled iterate drops the lowest-index violator instead of the
      // most negative one, which breaks degenerate cycles.
      int worst = -1;
      double worst_val = 0.0;
      const double lscale =
          1.0 + (lambda.size() ? lambda.lpNorm<Eigen::Infinity>() : 0.0);
      for (size_t k = 0; k < W.size(); ++k) {
        const double lk = lambda(me + k);
        if (lk >= -1e-11 * lscale) continue;
        if (stagnation >= stall_limit) {
          worst = static_cast<int>(k);
          break;
        }
        if (worst < 0 || lk < worst_val) {
          worst = static_cast<int>(k);
          worst_val = lk;
        }
      }
      if (worst < 0) {
        res.lam_eq = lambda.head(me);
        res.lam_in.setZero();
        for (size_t k = 0; k < W.size(); ++k)
          res.lam_in(W[k]) = std::max(0.0, lambda(me + k));
        res.ok = true;
        return res;
      }
      inW[W[worst]] = 0;
      W.erase(W.begin() + worst);
      if (!refactor()) return res;
      continue;
    }

    // Ratio test against inactive rows.
    double alpha = 1.0;
    int blocker = -1;
    for (int i = 0; i < mi; ++i) {
      if (inW[i]) continue;
      const double s = qp.Ain.row(i).dot(p);
      const double rowscale =
          qp.Ain.row(i).lpNorm<Eigen::Infinity>() *
              p.lpNorm<Eigen::Infinity>() +
          1e-300;
      if (s >= -1e-14 * rowscale) continue;
      const double r = qp.Ain.row(i).dot(res.x) - qp.bin(i);
      const double t = std::max(0.0, -r / s);
      if (t < alpha) {
        alpha = t;
        blocker = i;
      }
    }
    res.x += alpha * p;
    if (blocker >= 0) {
      W.push_back(blocker);
      inW[blocker] = 1;
      if (!refactor()) return res;
    }
  }
  return res;  // iteration cap; ok stays false
}

}  // namespace

QpResult solve_qp(const QpProblem& qp, const Eigen::VectorXd& x0,
                  int max_iter) {
  // Equilibrate before pivoting: unit Hessian diagonal and unit constraint
  // rows put the active-set loop at O(1) scales whatever the data
  // magnitudes, so its tolerances stay meaningful.
  const int n = static_cast<int>(qp.H.rows());
  const int me = static_cast<int>(qp.Aeq.rows());
  const int mi = static_cast<int>(qp.Ain.rows());

  const Eigen::VectorXd w =
      qp.H.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();

  QpProblem sq;
  sq.H = w.asDiagonal() * qp.H * w.asDiagonal();
  sq.g = w.cwiseProduct(qp.g);
  Eigen::VectorXd se = Eigen::VectorXd::Ones(me);
  Eigen::VectorXd si = Eigen::VectorXd::Ones(mi);
  if (me > 0) {
    sq.Aeq = qp.Aeq * w.asDiagonal();
    sq.beq = qp.beq;
    for (int i = 0; i < me; ++i) {
      se(i) = std::max(sq.Aeq.row(i).norm(), 1e-300);
      sq.Aeq.row(i) /= se(i);
      sq.beq(i) /= se(i);
    }
  } else {
    sq.Aeq.resize(0, n);
    sq.beq.resize(0);
  }
  if (mi > 0) {
    sq.Ain = qp.Ain * w.asDiagonal();
    sq.bin = qp.bin;
    for (int i = 0; i < mi; ++i) {
      si(i) = std::max(sq.Ain.row(i).norm(), 1e-300);
      sq.Ain.row(i) /= si(i);
      sq.bin(i) /= si(i);
    }
  } else {
    sq.Ain.resize(0, n);
    sq.bin.resize(0);
  }

  QpResult res = solve_scaled(sq, x0.cwiseQuotient(w), max_iter);
  res.x = w.cwiseProduct(res.x);
  if (me > 0) res.lam_eq = res.lam_eq.cwiseQuotient(se);
  if (mi > 0) res.lam_in = res.lam_in.cwiseQuotient(si);
  return res;
}

}  // namespace nlp::detail
