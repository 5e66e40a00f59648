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

#ifndef FAIRSSL_SOLVER_HPP
#define FAIRSSL_SOLVER_HPP

#include <optional>
#include <utility>
#include <vector>

#include "fairssl/common.hpp"
#include "fairssl/dataset.hpp"
#include "fairssl/fairness.hpp"
#include "fairssl/graph.hpp"
#include "fairssl/losses.hpp"
#include "fairssl/optim.hpp"

namespace fairssl {

struct SolverConfig {
  double alpha = 1.0;        // label-propagation weight
  double threshold = 0.5;    // T for rounding y_u
  int max_outer_iters = 50;
  double outer_tol = 1e-5;   // relative objective change
  double ccp_tau = 0.05;     // initial slack penalty
  double ccp_mu = 1.2;       // penalty growth
  int ccp_max_iters = 200;
  double wstep_tol = 1e-6;   // KKT / stationarity tolerance
  double ridge_eps = 1e-8;   // regularizer on U_uu
  double l2_reg = 0.0;       // conditioning ridge on non-intercept weights
  std::uint64_t seed = 0;

  void validate() const {
    if (alpha <= 0.0) throw InvalidArgument("solver config: alpha must be > 0");
    if (threshold <= 0.0 || threshold >= 1.0)
      throw InvalidArgument("solver config: threshold must be in (0,1)");
    if (outer_tol <= 0.0 || wstep_tol <= 0.0 || ridge_eps <= 0.0)
      throw InvalidArgument("solver config: tolerances must be > 0");
    if (ccp_mu <= 1.0) throw InvalidArgument("solver config: ccp_mu must be > 1");
    if (max_outer_iters < 1 || ccp_max_iters < 1)
      throw InvalidArgument("solver config: iteration counts must be >= 1");
    if (l2_reg < 0.0) throw InvalidArgument("solver config: l2_reg must be >= 0");
  }
};

/// Objective checkpoints of one outer iteration. The w-step and the
/// continuous y_u-step are non-increasing; rounding y_u may not be, so both
/// sides of the threshold are recorded.
struct ObjectivePoint {
  double after_w_step;
  double after_yu_continuous;
  double after_threshold;
};

struct CcpTrace {
  std::vector<double> slack_trace;  // total true slack per CCP iteration
  int iters = 0;
};

struct TrainReport {
  ModelParams w;
  IntVector y_u;  // final rounded labels for the unlabeled rows
  std::vector<ObjectivePoint> objective_trace;
  std::vector<std::vector<ConstraintEval>> constraint_trace;
  std::vector<CcpTrace> ccp_traces;  // mistreatment metrics only
  bool converged = false;
  int iters = 0;
};

/// Training rows in labeled-first order, shared by the w-step and the
/// graph. X has no intercept column; y holds current labels in [0,1].
struct TrainData {
  Matrix X;
  Vector y;
  IntVector z;
  Index n_labeled = 0;

  Index rows() const { return X.rows(); }
};

namespace detail {

struct ScopeRows {
  Index begin;
  Index end;
  double threshold;
};

inline std::vector<ScopeRows> scope_row_ranges(const FairnessConstraintSpec& spec,
                                               Index n_labeled, Index n_total) {
  spec.validate();
  if (spec.scope != Scope::Labeled && n_labeled == n_total)
    throw InvalidArgument("constraint scope requires unlabeled rows");
  switch (spec.scope) {
    case Scope::Labeled:
      return {{0, n_labeled, spec.c}};
    case Scope::Unlabeled:
      return {{n_labeled, n_total, spec.c}};
    case Scope::Combined:
      return {{0, n_labeled, spec.c}, {n_labeled, n_total, *spec.c2}};
    case Scope::Mixed:
      return {{0, n_total, spec.c}};
  }
  throw InvalidArgument("unknown scope");
}

// The optimizer sees the per-row mean loss so gradient tolerances do not
// scale with the row count; recorded objectives use the summed form. The
// optional l2 term on the non-intercept weights keeps separable resamples
// bounded.
inline Objective make_loss(ModelKind model, const Matrix& Xi, const Vector& y01,
                           double l2_reg = 0.0) {
  auto add_ridge = [l2_reg](const Vector& w, Vector& grad, double value) {
    if (l2_reg == 0.0) return value;
    const auto head = w.head(w.size() - 1);
    grad.head(w.size() - 1) += 2.0 * l2_reg * head;
    return value + l2_reg * head.squaredNorm();
  };
  if (model == ModelKind::LogisticRegression) {
    // Exact softplus form: (1-y) m + log(1 + e^-m), stable at any margin and
    // consistent with its gradient (the clipped reporting form saturates).
    return [&Xi, &y01, add_ridge](const Vector& w, Vector& grad) {
      const double k = static_cast<double>(Xi.rows());
      const Vector margins = Xi * w;
      double loss = 0.0;
      for (Index i = 0; i < margins.size(); ++i) {
        const double m = margins(i);
        const double log1pe =
            m > 0.0 ? std::log1p(std::exp(-m)) : std::log1p(std::exp(m)) - m;
        loss += (1.0 - y01(i)) * m + log1pe;
      }
      grad = Xi.transpose() * (sigmoid(margins) - y01) / k;
      return add_ridge(w, grad, loss / k);
    };
  }
  // Hinge smoothed near the kink so line searches see a gradient.
  return [&Xi, &y01, add_ridge](const Vector& w, Vector& grad) {
    const double k = static_cast<double>(Xi.rows());
    const Vector margins = Xi * w;
    double loss = 0.0;
    Vector coeff = Vector::Zero(Xi.rows());
    for (Index i = 0; i < Xi.rows(); ++i) {
      const double ys = 2.0 * y01(i) - 1.0;
      double dt;
      loss += smooth_pos(1.0 - ys * margins(i), 1e-6, dt);
      coeff(i) = -dt * ys / k;
    }
    grad = Xi.transpose() * coeff;
    return add_ridge(w, grad, loss / k);
  };
}

}  // namespace detail

/// DisparateImpact w-step: minimize the classifier loss subject to
/// |a^T w| <= c per scope, a = (1/K) X^T (z - zbar) over the scope rows.
/// KKT stationarity is enforced to cfg.wstep_tol, primal feasibility to
/// 1e-6.
inline ModelParams solve_w_convex(const TrainData& data,
                                  const FairnessConstraintSpec& spec,
                                  const SolverConfig& cfg, ModelKind model,
                                  const Vector* w_init = nullptr) {
  if (spec.metric != Metric::DisparateImpact)
    throw InvalidArgument("solve_w_convex handles DisparateImpact only");
  cfg.validate();
  const Matrix Xi = with_intercept(data.X);
  const auto ranges = detail::scope_row_ranges(spec, data.n_labeled, data.rows());

  std::vector<LinearConstraint> cons;
  for (const auto& r : ranges) {
    const Index n = r.end - r.begin;
    if (n <= 0) throw InvalidArgument("empty constraint scope");
    const Vector zd = data.z.segment(r.begin, n).cast<double>();
    const Vector centered = (zd.array() - zd.mean()).matrix();
    Vector a = Xi.middleRows(r.begin, n).transpose() * centered /
               static_cast<double>(n);
    if (a.lpNorm<Eigen::Infinity>() < 1e-14) continue;  // z constant in scope
    cons.push_back({a, r.threshold});
    cons.push_back({-a, r.threshold});
  }

  AlOptions opt;
  opt.kkt_tol = cfg.wstep_tol;
  Vector w0 = w_init ? *w_init : Vector::Zero(Xi.cols());
  ModelParams params{solve_augmented_lagrangian(
      detail::make_loss(model, Xi, data.y, cfg.l2_reg), cons, std::move(w0), opt)};
  params.validate();
  return params;
}

/// Unconstrained fit, used for CCP warm starts and the sampling baselines.
inline ModelParams fit_unconstrained(const Matrix& X, const Vector& y01,
                                     ModelKind model, const SolverConfig& cfg) {
  const Matrix Xi = with_intercept(X);
  AlOptions opt;
  opt.kkt_tol = cfg.wstep_tol;
  ModelParams params{solve_augmented_lagrangian(
      detail::make_loss(model, Xi, y01, cfg.l2_reg), {}, Vector::Zero(Xi.cols()), opt)};
  params.validate();
  return params;
}

namespace detail {

/// One difference-of-convex covariance constraint |coef^T min(0, Aw)| <= c.
/// Row i of A is y_i x_i, coef_i = (z_i - zbar)/K over the scope rows
/// (metric-masked rows dropped).
struct DcConstraint {
  Matrix A;
  Vector coef;
  double c;

  double value(const Vector& w) const {
    return coef.dot((A * w).cwiseMin(0.0));
  }
};

inline std::vector<DcConstraint> build_dc_constraints(
    const TrainData& data, const FairnessConstraintSpec& spec) {
  const Matrix Xi = with_intercept(data.X);
  const auto ranges = scope_row_ranges(spec, data.n_labeled, data.rows());
  std::vector<DcConstraint> out;
  for (const auto& r : ranges) {
    const Index n = r.end - r.begin;
    const double zbar = data.z.segment(r.begin, n).cast<double>().mean();
    std::vector<Index> rows;
    for (Index i = r.begin; i < r.end; ++i) {
      const double ys = 2.0 * data.y(i) - 1.0;
      if (spec.metric == Metric::Fpr && ys > 0.0) continue;
      if (spec.metric == Metric::Fnr && ys < 0.0) continue;
      rows.push_back(i);
    }
    DcConstraint con;
    con.c = r.threshold;
    con.A.resize(static_cast<Index>(rows.size()), Xi.cols());
    con.coef.resize(static_cast<Index>(rows.size()));
    for (Index j = 0; j < static_cast<Index>(rows.size()); ++j) {
      const Index i = rows[j];
      const double ys = 2.0 * data.y(i) - 1.0;
      con.A.row(j) = ys * Xi.row(i);
      con.coef(j) = (static_cast<double>(data.z(i)) - zbar) /
                    static_cast<double>(n);
    }
    out.push_back(std::move(con));
  }
  return out;
}

}  // namespace detail

struct CcpResult {
  ModelParams w;
  CcpTrace trace;
};

/// Mistreatment w-step via the convex-concave procedure: min(0,h) is split
/// as h - max(0,h), the concave occurrences of max(0,h) are linearized at
/// the current iterate, and each convex subproblem minimizes
/// loss + tau_k * sum(slacks) with tau growing by mu. Labels must be binary
/// on every row in scope. Throws InfeasibleError when the slacks cannot be
/// driven below 1e-4 within the iteration budget.
inline CcpResult solve_w_ccp(const TrainData& data,
                             const FairnessConstraintSpec& spec,
                             const SolverConfig& cfg, ModelKind model,
                             const Vector* w_init = nullptr) {
  if (spec.metric == Metric::DisparateImpact)
    throw InvalidArgument("solve_w_ccp handles mistreatment metrics only");
  cfg.validate();
  for (Index i = 0; i < data.y.size(); ++i)
    if (data.y(i) != 0.0 && data.y(i) != 1.0)
      throw InvalidArgument("solve_w_ccp: labels must be binary");

  const Matrix Xi = with_intercept(data.X);
  const auto loss = detail::make_loss(model, Xi, data.y, cfg.l2_reg);
  const auto cons = detail::build_dc_constraints(data, spec);

  constexpr double slack_tol = 1e-4;
  constexpr double m_delta = 1e-7;  // smoothing of the inner max(0,h)
  // Slack-hinge smoothing; the induced constraint error (delta/4) stays two
  // orders below slack_tol while keeping the kink curvature tractable.
  constexpr double s_delta = 1e-5;

  auto total_slack = [&](const Vector& w) {
    double s = 0.0;
    for (const auto& con : cons)
      s += std::max(0.0, std::abs(con.value(w)) - con.c);
    return s;
  };

  Vector w = w_init ? *w_init : Vector::Zero(Xi.cols());
  double tau = cfg.ccp_tau;
  CcpResult result;
  double prev_slack = total_slack(w);

  for (int k = 0; k < cfg.ccp_max_iters; ++k) {
    // Freeze the linearization of the concave parts at the current iterate.
    // h is linear in w, so the tangent of max(0, h_i) is h_i(w) on the rows
    // active at w_k and 0 elsewhere; each constraint side linearizes only
    // the rows whose coefficient sign makes the term concave there.
    std::vector<Vector> lin_grad_pos, lin_grad_neg;
    for (const auto& con : cons) {
      const Vector h = con.A * w;
      Vector gpos = Vector::Zero(Xi.cols());
      Vector gneg = Vector::Zero(Xi.cols());
      for (Index i = 0; i < con.coef.size(); ++i) {
        if (h(i) <= 0.0) continue;
        if (con.coef(i) > 0.0)
          gpos += con.coef(i) * con.A.row(i).transpose();
        else if (con.coef(i) < 0.0)
          gneg += -con.coef(i) * con.A.row(i).transpose();
      }
      lin_grad_pos.push_back(std::move(gpos));
      lin_grad_neg.push_back(std::move(gneg));
    }

    auto subproblem = [&](const Vector& x, Vector& grad) {
      double v = loss(x, grad);
      for (std::size_t ci = 0; ci < cons.size(); ++ci) {
        const auto& con = cons[ci];
        const Vector h = con.A * x;
        // Convex side values and gradients of the surrogate pair.
        double a_val = con.coef.dot(h);          // sum c_i h_i
        Vector a_grad = con.A.transpose() * con.coef;
        double b_val = -a_val;
        Vector b_grad = -a_grad;
        for (Index i = 0; i < con.coef.size(); ++i) {
          double dt;
          const double m = smooth_pos(h(i), m_delta, dt);
          if (con.coef(i) < 0.0) {
            // kept convex on side A, linearized on side B
            a_val += -con.coef(i) * m;
            a_grad += -con.coef(i) * dt * con.A.row(i).transpose();
          } else if (con.coef(i) > 0.0) {
            // linearized on side A, kept convex on side B
            b_val += con.coef(i) * m;
            b_grad += con.coef(i) * dt * con.A.row(i).transpose();
          }
        }
        a_val -= lin_grad_pos[ci].dot(x);
        a_grad -= lin_grad_pos[ci];
        b_val -= lin_grad_neg[ci].dot(x);
        b_grad -= lin_grad_neg[ci];

        double ds;
        v += tau * smooth_pos(a_val - con.c, s_delta, ds);
        if (ds > 0.0) grad += tau * ds * a_grad;
        v += tau * smooth_pos(b_val - con.c, s_delta, ds);
        if (ds > 0.0) grad += tau * ds * b_grad;
      }
      return v;
    };

    // Inexact subproblem solves: loose while the penalty ramps up, tighter
    // near feasibility. The outer loop judges slack on the true constraint
    // values, so subproblem precision only affects the iterate path.
    GdOptions inner;
    inner.max_iters = 2000;
    inner.grad_tol = prev_slack > 10.0 * slack_tol
                         ? 100.0 * cfg.wstep_tol
                         : std::max(10.0 * cfg.wstep_tol, 1e-5);
    GdResult sub = minimize_gd(subproblem, w, inner);

    const double slack = total_slack(sub.w);
    const double movement = (sub.w - w).lpNorm<Eigen::Infinity>() /
                            (1.0 + w.lpNorm<Eigen::Infinity>());
    if (k > 0 && slack > prev_slack + 1e-12) {
      // The new linearization overshot; keep the current iterate and lean
      // harder on the penalty.
      result.trace.slack_trace.push_back(prev_slack);
      result.trace.iters = k + 1;
      tau *= cfg.ccp_mu;
      if (prev_slack <= slack_tol) break;
      continue;
    }
    w = sub.w;
    prev_slack = slack;
    result.trace.slack_trace.push_back(slack);
    result.trace.iters = k + 1;
    if (slack <= slack_tol && movement <= cfg.wstep_tol) break;
    tau *= cfg.ccp_mu;
  }

  if (prev_slack > slack_tol) {
    double worst_c = cons.empty() ? 0.0 : cons.front().c;
    throw InfeasibleError(worst_c, prev_slack);
  }
  result.w = ModelParams{w};
  result.w.validate();
  return result;
}

/// Solve the stationarity system of the continuous y_u subproblem:
/// 2 alpha (U_uu + eps I) y_u = -2 alpha U_ul y_l - d, where d is the
/// per-row derivative of the classifier loss in y_u.
inline Vector solve_yu_linear_system(const Vector& d, const Vector& y_l,
                                     const GraphLaplacian& lap, double alpha,
                                     double ridge_eps) {
  const Index ku = lap.n_unlabeled();
  if (d.size() != ku) throw InvalidArgument("solve_yu: gradient length != K_u");
  if (y_l.size() != lap.block_index)
    throw InvalidArgument("solve_yu: labeled length != block index");
  Matrix lhs = 2.0 * alpha * lap.u_uu();
  lhs.diagonal().array() += 2.0 * alpha * ridge_eps;
  const Vector rhs = -2.0 * alpha * (lap.u_ul() * y_l) - d;
  Eigen::LDLT<Matrix> ldlt(lhs);
  if (ldlt.info() != Eigen::Success)
    throw ConvergenceError("y_u system is singular", 0.0);
  return ldlt.solve(rhs);
}

/// Closed-form label propagation for the logistic loss: d_i = ln((1-p)/p)
/// on the unlabeled rows. X is the full training matrix without intercept,
/// labeled-first.
inline Vector solve_yu_closed_form(const ModelParams& params, const Vector& y_l,
                                   const GraphLaplacian& lap, double alpha,
                                   const Matrix& X, double ridge_eps = 1e-8) {
  const Index ku = lap.n_unlabeled();
  const Matrix Xu = with_intercept(X.bottomRows(ku));
  const Vector p = sigmoid((Xu * params.w).eval())
                       .array()
                       .max(kProbClip)
                       .min(1.0 - kProbClip)
                       .matrix();
  const Vector d = ((1.0 - p.array()) / p.array()).log().matrix();
  return solve_yu_linear_system(d, y_l, lap, alpha, ridge_eps);
}

/// Round the continuous propagation to labels: y >= T -> 1 else 0.
inline IntVector threshold_labels(const Vector& y_u, double threshold) {
  if (threshold <= 0.0 || threshold >= 1.0)
    throw InvalidArgument("threshold_labels: T must be in (0,1)");
  IntVector out(y_u.size());
  for (Index i = 0; i < y_u.size(); ++i) out(i) = y_u(i) >= threshold ? 1 : 0;
  return out;
}

namespace detail {

inline double classifier_loss(ModelKind model, const Matrix& Xi,
                              const Vector& y01, const ModelParams& params) {
  if (model == ModelKind::LogisticRegression)
    return lr_loss_grad(params, Xi, y01).first;
  return svm_loss_subgrad(params, Xi, to_signed_labels(y01)).first;
}

inline double full_objective(ModelKind model, const Matrix& Xi,
                             const Vector& y01, const ModelParams& params,
                             const GraphLaplacian* lap, double alpha) {
  double obj = classifier_loss(model, Xi, y01, params);
  if (lap) obj += alpha * y01.dot(lap->laplacian * y01);
  return obj;
}

/// SVM y_u-step: freeze the hinge active set at the current labels, solve
/// the resulting linear system, then take the best point on the segment
/// between old and new (the true subproblem is convex along it).
inline Vector solve_yu_svm(const ModelParams& params, const Vector& y_l,
                           const Vector& y_u_current, const GraphLaplacian& lap,
                           double alpha, const Matrix& X, double ridge_eps) {
  const Index ku = lap.n_unlabeled();
  const Matrix Xu = with_intercept(X.bottomRows(ku));
  const Vector margins = Xu * params.w;
  const double k = static_cast<double>(X.rows());
  Vector d(ku);
  for (Index i = 0; i < ku; ++i) {
    const double ys = 2.0 * y_u_current(i) - 1.0;
    d(i) = (ys * margins(i) < 1.0) ? -2.0 * margins(i) / k : 0.0;
  }
  const Vector y_new = solve_yu_linear_system(d, y_l, lap, alpha, ridge_eps);

  auto objective_at = [&](double t) {
    const Vector yu = y_u_current + t * (y_new - y_u_current);
    double obj = 0.0;
    for (Index i = 0; i < ku; ++i) {
      const double ys = 2.0 * yu(i) - 1.0;
      obj += std::max(0.0, 1.0 - ys * margins(i));
    }
    obj /= k;
    Vector y_full(lap.size());
    y_full << y_l, yu;
    obj += alpha * y_full.dot(lap.laplacian * y_full);
    return obj;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (objective_at(m1) <= objective_at(m2))
      hi = m2;
    else
      lo = m1;
  }
  const double t_best = 0.5 * (lo + hi);
  return objective_at(t_best) <= objective_at(1.0)
             ? (y_u_current + t_best * (y_new - y_u_current)).eval()
             : y_new;
}

}  // namespace detail

/// Alternating optimization of the joint objective: a fairness-constrained
/// w-step (convex for DisparateImpact, CCP otherwise) and the closed-form
/// continuous y_u-step followed by rounding. With no unlabeled rows the
/// scope collapses to Labeled and a single w-step is performed (the
/// supervised FS baseline). Deterministic in cfg.seed.
inline TrainReport train(const Dataset& labeled, const Dataset& unlabeled,
                         const GraphLaplacian* lap, ModelKind model,
                         const FairnessConstraintSpec& spec,
                         const SolverConfig& cfg) {
  cfg.validate();
  spec.validate();
  if (!labeled.labels) throw InvalidArgument("train: labeled part has no labels");
  const Index kl = labeled.rows();
  const Index ku = unlabeled.rows();
  if (ku > 0) {
    if (!lap) throw InvalidArgument("train: unlabeled rows but no graph");
    if (lap->block_index != kl || lap->size() != kl + ku)
      throw InvalidArgument("train: graph blocks do not match the split");
  }

  TrainData data;
  data.n_labeled = kl;
  data.X.resize(kl + ku, labeled.cols());
  data.X.topRows(kl) = labeled.features;
  if (ku > 0) data.X.bottomRows(ku) = unlabeled.features;
  data.z.resize(kl + ku);
  data.z.head(kl) = labeled.sensitive;
  if (ku > 0) data.z.tail(ku) = unlabeled.sensitive;

  const Vector y_l = labeled.labels->cast<double>();
  const Matrix Xi = with_intercept(data.X);

  FairnessConstraintSpec effective = spec;
  if (ku == 0) {
    effective.scope = Scope::Labeled;
    effective.c2.reset();
  }

  auto w_step = [&](const Vector* w_init, TrainReport& report) {
    if (effective.metric == Metric::DisparateImpact)
      return solve_w_convex(data, effective, cfg, model, w_init);
    CcpResult res = solve_w_ccp(data, effective, cfg, model, w_init);
    report.ccp_traces.push_back(std::move(res.trace));
    return res.w;
  };

  auto record_constraints = [&](TrainReport& report, const ModelParams& params) {
    ConstraintPart lab{Matrix(Xi.topRows(kl)), Vector(), labeled.sensitive};
    ConstraintPart unl{ku > 0 ? Matrix(Xi.bottomRows(ku)) : Matrix(0, Xi.cols()),
                       Vector(), ku > 0 ? unlabeled.sensitive : IntVector()};
    if (effective.metric != Metric::DisparateImpact) {
      lab.y_signed = to_signed_labels(y_l);
      if (ku > 0) unl.y_signed = to_signed_labels(data.y.tail(ku));
    }
    report.constraint_trace.push_back(
        constraint_values_for_scope(effective, params, lab, unl));
  };

  TrainReport report;

  if (ku == 0) {
    data.y = y_l;
    report.w = w_step(nullptr, report);
    record_constraints(report, report.w);
    const double obj =
        detail::full_objective(model, Xi, data.y, report.w, nullptr, cfg.alpha);
    report.objective_trace.push_back({obj, obj, obj});
    report.converged = true;
    report.iters = 1;
    report.y_u.resize(0);
    return report;
  }

  // Random {0,1} initialization of the unlabeled labels.
  Rng rng = make_rng(cfg.seed);
  Vector y_u(ku);
  for (Index i = 0; i < ku; ++i)
    y_u(i) = static_cast<double>(uniform_below(rng, 2));

  data.y.resize(kl + ku);
  data.y.head(kl) = y_l;
  data.y.tail(ku) = y_u;

  ModelParams params;
  double prev_obj = std::numeric_limits<double>::infinity();
  bool have_w = false;

  for (int iter = 0; iter < cfg.max_outer_iters; ++iter) {
    // w-step against the current binary labels.
    ModelParams next = w_step(have_w ? &params.w : nullptr, report);
    if (have_w && effective.metric != Metric::DisparateImpact) {
      // CCP is a local heuristic: keep the previous iterate when it is both
      // feasible for the current labels and better.
      double slack = 0.0;
      for (const auto& con : detail::build_dc_constraints(data, effective))
        slack += std::max(0.0, std::abs(con.value(params.w)) - con.c);
      if (slack <= 1e-4 &&
          detail::classifier_loss(model, Xi, data.y, params) <
              detail::classifier_loss(model, Xi, data.y, next))
        next = params;
    }
    params = next;
    have_w = true;
    record_constraints(report, params);
    const double obj_w =
        detail::full_objective(model, Xi, data.y, params, lap, cfg.alpha);

    // Continuous y_u-step.
    Vector y_cont;
    if (model == ModelKind::LogisticRegression)
      y_cont = solve_yu_closed_form(params, y_l, *lap, cfg.alpha, data.X,
                                    cfg.ridge_eps);
    else
      y_cont = detail::solve_yu_svm(params, y_l, data.y.tail(ku), *lap,
                                    cfg.alpha, data.X, cfg.ridge_eps);
    Vector y_full(kl + ku);
    y_full << y_l, y_cont;
    const double obj_cont =
        detail::full_objective(model, Xi, y_full, params, lap, cfg.alpha);

    // Rounding step (Eq.-22-style threshold); may increase the objective.
    const IntVector y_bin = threshold_labels(y_cont, cfg.threshold);
    data.y.tail(ku) = y_bin.cast<double>();
    const double obj_th =
        detail::full_objective(model, Xi, data.y, params, lap, cfg.alpha);

    report.objective_trace.push_back({obj_w, obj_cont, obj_th});
    report.iters = iter + 1;

    if (std::isfinite(prev_obj) &&
        std::abs(obj_th - prev_obj) <= cfg.outer_tol * std::max(1.0, std::abs(prev_obj))) {
      report.converged = true;
      break;
    }
    prev_obj = obj_th;
  }

  // Final polish so the returned w is trained against the returned labels.
  ModelParams polished = w_step(&params.w, report);
  if (effective.metric != Metric::DisparateImpact) {
    double slack = 0.0;
    for (const auto& con : detail::build_dc_constraints(data, effective))
      slack += std::max(0.0, std::abs(con.value(params.w)) - con.c);
    if (slack <= 1e-4 &&
        detail::classifier_loss(model, Xi, data.y, params) <
            detail::classifier_loss(model, Xi, data.y, polished))
      polished = params;
  }
  params = polished;
  record_constraints(report, params);
  const double obj_final =
      detail::full_objective(model, Xi, data.y, params, lap, cfg.alpha);
  report.objective_trace.push_back({obj_final, obj_final, obj_final});

  report.w = params;
  report.y_u = threshold_labels(data.y.tail(ku), cfg.threshold);
  return report;
}

}  // namespace fairssl

#endif  // FAIRSSL_SOLVER_HPP
