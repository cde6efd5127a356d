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

#include "plant/model.hpp"

#include <cmath>
#include <sstream>

namespace plant {

namespace {

void check_args(const PlantModel& model, const Eigen::VectorXd& x,
                const Eigen::VectorXd& u) {
  if (x.size() != model.n || u.size() != model.m) {
    std::ostringstream os;
    os << "plant: got state/input of size " << x.size() << "/" << u.size()
       << ", expected " << model.n << "/" << model.m;
    throw std::invalid_argument(os.str());
  }
}

void check_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite())
    throw nonfinite_error(std::string("plant: non-finite ") + what);
}

Eigen::MatrixXd fd_jacobian(const StateMap& fn, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& u, bool wrt_x,
                            int out_size) {
  const Eigen::VectorXd& v = wrt_x ? x : u;
  Eigen::MatrixXd J(out_size, v.size());
  Eigen::VectorXd vp = v;
  for (int i = 0; i < v.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(v(i)));
    vp(i) = v(i) + h;
    const Eigen::VectorXd fp = wrt_x ? fn(vp, u) : fn(x, vp);
    vp(i) = v(i) - h;
    const Eigen::VectorXd fm = wrt_x ? fn(vp, u) : fn(x, vp);
    vp(i) = v(i);
    J.col(i) = (fp - fm) / (2.0 * h);
  }
  return J;
}

Eigen::MatrixXd fd_steady_jacobian(const SteadyMap& fn,
                                   const Eigen::VectorXd& y, int out_size) {
  Eigen::MatrixXd J(out_size, y.size());
  Eigen::VectorXd yp = y;
  for (int i = 0; i < y.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(y(i)));
    yp(i) = y(i) + h;
    const Eigen::VectorXd fp = fn(yp);
    yp(i) = y(i) - h;
    const Eigen::VectorXd fm = fn(yp);
    yp(i) = y(i);
    J.col(i) = (fp - fm) / (2.0 * h);
  }
  return J;
}

}  // namespace

Eigen::VectorXd step(const PlantModel& model, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& u) {
  check_args(model, x, u);
  check_finite(x, "state");
  check_finite(u, "input");
  Eigen::VectorXd xn = model.f(x, u);
  check_finite(xn, "successor state");
  return xn;
}

Eigen::VectorXd output(const PlantModel& model, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& u) {
  check_args(model, x, u);
  Eigen::VectorXd y = model.h(x, u);
  check_finite(y, "output");
  return y;
}

Eigen::MatrixXd step_jacobian_x(const PlantModel& model,
                                const Eigen::VectorXd& x,
                                const Eigen::VectorXd& u) {
  check_args(model, x, u);
  return model.f_x ? model.f_x(x, u) : fd_jacobian(model.f, x, u, true, model.n);
}

Eigen::MatrixXd step_jacobian_u(const PlantModel& model,
                                const Eigen::VectorXd& x,
                                const Eigen::VectorXd& u) {
  check_args(model, x, u);
  return model.f_u ? model.f_u(x, u) : fd_jacobian(model.f, x, u, false, model.n);
}

Eigen::MatrixXd output_jacobian_x(const PlantModel& model,
                                  const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& u) {
  check_args(model, x, u);
  return model.h_x ? model.h_x(x, u) : fd_jacobian(model.h, x, u, true, model.p);
}

Eigen::MatrixXd output_jacobian_u(const PlantModel& model,
                                  const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& u) {
  check_args(model, x, u);
  return model.h_u ? model.h_u(x, u) : fd_jacobian(model.h, x, u, false, model.p);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> steady_state(
    const PlantModel& model, const Eigen::VectorXd& y) {
  if (y.size() != model.p)
    throw std::invalid_argument("steady_state: output has wrong dimension");
  if (model.g_x && model.g_u) return {model.g_x(y), model.g_u(y)};

  // Damped Gauss-Newton on r(x,u) = [f(x,u) - x; h(x,u) - y].
  Eigen::VectorXd x = Eigen::VectorXd::Zero(model.n);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(model.m);
  const int nr = model.n + model.p;
  const int nv = model.n + model.m;

  auto residual = [&](const Eigen::VectorXd& xc, const Eigen::VectorXd& uc) {
    Eigen::VectorXd r(nr);
    r.head(model.n) = model.f(xc, uc) - xc;
    r.tail(model.p) = model.h(xc, uc) - y;
    return r;
  };

  Eigen::VectorXd r = residual(x, u);
  for (int it = 0; it < 100; ++it) {
    if (r.lpNorm<Eigen::Infinity>() <= 1e-12) break;
    Eigen::MatrixXd J(nr, nv);
    J.block(0, 0, model.n, model.n) =
        step_jacobian_x(model, x, u) -
        Eigen::MatrixXd::Identity(model.n, model.n);
    J.block(0, model.n, model.n, model.m) = step_jacobian_u(model, x, u);
    J.block(model.n, 0, model.p, model.n) = output_jacobian_x(model, x, u);
    J.block(model.n, model.n, model.p, model.m) =
        output_jacobian_u(model, x, u);

    const Eigen::VectorXd d = J.colPivHouseholderQr().solve(-r);
    if (!d.allFinite())
      throw no_steady_state_error("steady_state: Newton step not finite");

    double alpha = 1.0;
    const double r0 = r.squaredNorm();
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Eigen::VectorXd xt = x + alpha * d.head(model.n);
      const Eigen::VectorXd ut = u + alpha * d.tail(model.m);
      const Eigen::VectorXd rt = residual(xt, ut);
      if (rt.allFinite() && rt.squaredNorm() < r0 * (1.0 - 1e-4 * alpha)) {
        x = xt;
        u = ut;
        r = rt;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // stalled; the tolerance check below decides
  }
  if (r.lpNorm<Eigen::Infinity>() > 1e-10)
    throw no_steady_state_error("steady_state: no solution within tolerance");
  return {x, u};
}

Eigen::MatrixXd steady_state_jacobian(const PlantModel& model,
                                      const Eigen::VectorXd& y) {
  if (model.g_x_jac) return model.g_x_jac(y);
  const SteadyMap fn = model.g_x
                           ? model.g_x
                           : SteadyMap([&model](const Eigen::VectorXd& yy) {
                               return steady_state(model, yy).first;
                             });
  return fd_steady_jacobian(fn, y, model.n);
}

Eigen::MatrixXd steady_input_jacobian(const PlantModel& model,
                                      const Eigen::VectorXd& y) {
  if (model.g_u_jac) return model.g_u_jac(y);
  const SteadyMap fn = model.g_u
                           ? model.g_u
                           : SteadyMap([&model](const Eigen::VectorXd& yy) {
                               return steady_state(model, yy).second;
                             });
  return fd_steady_jacobian(fn, y, model.m);
}

}  // namespace plant
