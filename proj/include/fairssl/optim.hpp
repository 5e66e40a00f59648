/*
 * Copyright 2026 The fairssl authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FAIRSSL_OPTIM_HPP
#define FAIRSSL_OPTIM_HPP

#include <algorithm>
#include <functional>
#include <vector>

#include "fairssl/common.hpp"

namespace fairssl {

/// Objective callback: fill `grad` and return the value at `w`.
using Objective = std::function<double(const Vector& w, Vector& grad)>;

struct GdOptions {
  double grad_tol = 1e-8;
  int max_iters = 12000;
};

struct GdResult {
  Vector w;
  double value = 0.0;
  double grad_inf_norm = 0.0;
  int iters = 0;
  bool converged = false;
};

/// Gradient descent with a Barzilai-Borwein initial step and Armijo
/// backtracking. Good enough for the smooth convex problems in this
/// library; the caller checks `converged`.
inline GdResult minimize_gd(const Objective& fg, Vector w,
                            const GdOptions& opt = {}) {
  GdResult res;
  Vector grad(w.size());
  double value = fg(w, grad);
  double step = 1.0 / (1.0 + grad.norm());
  Vector w_prev = w, grad_prev = grad;
  constexpr double armijo = 1e-4;

  int it = 0;
  for (; it < opt.max_iters; ++it) {
    res.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
    if (res.grad_inf_norm <= opt.grad_tol) {
      res.converged = true;
      break;
    }
    if (it > 0) {
      const Vector s = w - w_prev;
      const Vector g = grad - grad_prev;
      const double sg = s.dot(g);
      step = sg > 1e-30 ? std::min(std::max(s.squaredNorm() / sg, 1e-12), 1e6)
                        : std::min(step * 2.0, 1e6);
    }
    w_prev = w;
    grad_prev = grad;
    const double g2 = grad.squaredNorm();
    double t = step;
    Vector w_try;
    double v_try = value;
    bool accepted = false;
    for (int bt = 0; bt < 80 && !accepted; ++bt) {
      w_try = w_prev - t * grad_prev;
      Vector g_unused(w.size());
      v_try = fg(w_try, g_unused);
      if (std::isfinite(v_try) && v_try <= value - armijo * t * g2)
        accepted = true;
      else
        t *= 0.5;
    }
    if (!accepted) break;  // stalled at numerical precision
    w = w_try;
    value = fg(w, grad);
  }
  res.w = std::move(w);
  res.value = value;
  res.iters = it;
  res.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
  if (res.grad_inf_norm <= opt.grad_tol) res.converged = true;
  return res;
}

/// One half of a two-sided covariance bound: a^T w <= ub.
struct LinearConstraint {
  Vector a;
  double ub;
};

struct AlOptions {
  double kkt_tol = 1e-6;   // stationarity, infinity norm
  double feas_tol = 1e-6;  // max constraint violation
  int max_outer = 60;
  double rho0 = 1.0;
  double rho_growth = 10.0;
  double rho_max = 1e12;
  GdOptions inner;
};

/// Minimize a smooth convex loss subject to linear inequality constraints
/// with an augmented Lagrangian whose inner problems are solved by
/// minimize_gd. Returns the primal point; throws ConvergenceError when the
/// outer loop budget runs out before the KKT conditions hold.
inline Vector solve_augmented_lagrangian(const Objective& loss,
                                         const std::vector<LinearConstraint>& cons,
                                         Vector w0, const AlOptions& opt) {
  if (cons.empty()) {
    GdOptions inner = opt.inner;
    inner.grad_tol = opt.kkt_tol;
    GdResult res = minimize_gd(loss, std::move(w0), inner);
    if (!res.converged)
      throw ConvergenceError("unconstrained minimize did not reach tolerance",
                             res.grad_inf_norm);
    return res.w;
  }

  const std::size_t m = cons.size();
  std::vector<double> lambda(m, 0.0);
  double rho = opt.rho0;
  Vector w = std::move(w0);
  double prev_viol = std::numeric_limits<double>::infinity();
  int stalled_inners = 0;

  GdOptions inner = opt.inner;
  inner.grad_tol = 0.5 * opt.kkt_tol;

  for (int outer = 0; outer < opt.max_outer; ++outer) {
    auto augmented = [&](const Vector& x, Vector& grad) {
      double v = loss(x, grad);
      for (std::size_t j = 0; j < m; ++j) {
        const double h = cons[j].a.dot(x) - cons[j].ub;
        const double active = std::max(0.0, lambda[j] + rho * h);
        v += (active * active - lambda[j] * lambda[j]) / (2.0 * rho);
        if (active > 0.0) grad += active * cons[j].a;
      }
      return v;
    };
    GdResult res = minimize_gd(augmented, w, inner);
    w = res.w;

    double viol = 0.0, comp = 0.0, lambda_shift = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double h = cons[j].a.dot(w) - cons[j].ub;
      const double mult = std::max(0.0, lambda[j] + rho * h);
      viol = std::max(viol, h);
      comp = std::max(comp, std::abs(mult * std::min(h, 0.0)));
      lambda_shift = std::max(lambda_shift, std::abs(mult - lambda[j]));
      lambda[j] = mult;
    }
    viol = std::max(viol, 0.0);

    if (res.converged && viol <= opt.feas_tol &&
        comp <= 1e-4 * (1.0 + *std::max_element(lambda.begin(), lambda.end())))
      return w;

    const double rho_before = rho;
    if (viol > 0.25 * prev_viol) rho = std::min(rho * opt.rho_growth, opt.rho_max);
    prev_viol = std::max(viol, 1e-300);

    // When the next subproblem is the same one that just failed to reach
    // stationarity, rerunning cannot help; fail fast with the residual.
    const bool same_subproblem =
        rho == rho_before && lambda_shift <= 1e-12 * (1.0 + rho);
    stalled_inners = (!res.converged && same_subproblem) ? stalled_inners + 1 : 0;
    if (stalled_inners >= 2)
      throw ConvergenceError("w-step stationarity unreachable",
                             res.grad_inf_norm);
  }
  double residual = 0.0;
  for (const auto& c : cons)
    residual = std::max(residual, c.a.dot(w) - c.ub);
  throw ConvergenceError("augmented Lagrangian did not converge", residual);
}

/// Smoothed max(0, t): quadratic on |t| < delta so gradients stay
/// continuous through the hinge.
inline double smooth_pos(double t, double delta, double& dt) {
  if (t <= -delta) {
    dt = 0.0;
    return 0.0;
  }
  if (t >= delta) {
    dt = 1.0;
    return t;
  }
  dt = (t + delta) / (2.0 * delta);
  const double u = t + delta;
  return u * u / (4.0 * delta);
}

}  // namespace fairssl

#endif  // FAIRSSL_OPTIM_HPP
