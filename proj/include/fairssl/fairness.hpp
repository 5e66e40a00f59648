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

#ifndef FAIRSSL_FAIRNESS_HPP
#define FAIRSSL_FAIRNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "fairssl/common.hpp"
#include "fairssl/losses.hpp"

namespace fairssl {

enum class Metric { DisparateImpact, Omr, Fpr, Fnr };
enum class Scope { Labeled, Unlabeled, Combined, Mixed };

inline std::string metric_name(Metric m) {
  switch (m) {
    case Metric::DisparateImpact: return "di";
    case Metric::Omr: return "omr";
    case Metric::Fpr: return "fpr";
    case Metric::Fnr: return "fnr";
  }
  return "?";
}

/// Which covariance constraint to enforce, on which rows, and how tightly.
/// `c2` bounds the unlabeled half of the Combined scope.
struct FairnessConstraintSpec {
  Metric metric = Metric::DisparateImpact;
  Scope scope = Scope::Mixed;
  double c = 0.0;
  std::optional<double> c2;

  void validate() const {
    if (c < 0.0) throw InvalidArgument("constraint spec: c must be >= 0");
    if (scope == Scope::Combined) {
      if (!c2) throw InvalidArgument("constraint spec: Combined scope needs c2");
      if (*c2 < 0.0) throw InvalidArgument("constraint spec: c2 must be >= 0");
    } else if (c2) {
      throw InvalidArgument("constraint spec: c2 only valid for Combined scope");
    }
  }
};

/// Per-group rate and the absolute difference between the groups.
struct DiscriminationReport {
  Metric metric;
  double gamma0;
  double gamma1;
  double level;
};

/// One evaluated covariance constraint: satisfied iff |value| <= threshold.
struct ConstraintEval {
  double value;
  double threshold;
};

/// Signed-distance vector g_w. DisparateImpact ignores labels; the
/// mistreatment metrics require y in {-1,+1} (pass the current propagated
/// labels for unlabeled rows).
inline Vector signed_distance(Metric metric, const ModelParams& params,
                              const Matrix& X, const Vector& y_signed) {
  const Vector margins = X * params.w;
  if (metric == Metric::DisparateImpact) return margins;
  if (y_signed.size() != X.rows())
    throw InvalidArgument("signed_distance: labels required for " +
                          metric_name(metric));
  for (Index i = 0; i < y_signed.size(); ++i)
    if (y_signed(i) != 1.0 && y_signed(i) != -1.0)
      throw InvalidArgument("signed_distance: labels must be -1/+1");
  Vector g(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    const double ym = y_signed(i) * margins(i);
    double mask = 1.0;
    if (metric == Metric::Fpr) mask = (1.0 - y_signed(i)) / 2.0;
    if (metric == Metric::Fnr) mask = (1.0 + y_signed(i)) / 2.0;
    g(i) = std::min(0.0, mask * ym);
  }
  return g;
}

/// (1/K) sum_i g_i (z_i - zbar): the covariance between group membership
/// and the signed distance.
inline double constraint_value(const Vector& g_w, const IntVector& z) {
  if (g_w.size() == 0) throw InvalidArgument("constraint_value: empty input");
  if (g_w.size() != z.size())
    throw InvalidArgument("constraint_value: length mismatch");
  const double zbar = z.cast<double>().mean();
  return (g_w.array() * (z.cast<double>().array() - zbar)).sum() /
         static_cast<double>(g_w.size());
}

/// One part of the training data as seen by the constraint machinery.
/// X carries the intercept column; y_signed may be empty for
/// DisparateImpact.
struct ConstraintPart {
  Matrix X;
  Vector y_signed;
  IntVector z;
};

/// Evaluate the constraint pair(s) implied by the scope. Combined returns
/// two entries (labeled at c, unlabeled at c2); Mixed concatenates the
/// parts and centers z over the concatenation.
inline std::vector<ConstraintEval> constraint_values_for_scope(
    const FairnessConstraintSpec& spec, const ModelParams& params,
    const ConstraintPart& labeled, const ConstraintPart& unlabeled) {
  spec.validate();
  auto eval_part = [&](const ConstraintPart& part, double threshold) {
    const Vector g = signed_distance(spec.metric, params, part.X, part.y_signed);
    return ConstraintEval{constraint_value(g, part.z), threshold};
  };
  const bool needs_unlabeled = spec.scope != Scope::Labeled;
  if (needs_unlabeled && unlabeled.X.rows() == 0)
    throw InvalidArgument("constraint scope requires unlabeled rows");
  switch (spec.scope) {
    case Scope::Labeled:
      return {eval_part(labeled, spec.c)};
    case Scope::Unlabeled:
      return {eval_part(unlabeled, spec.c)};
    case Scope::Combined:
      return {eval_part(labeled, spec.c), eval_part(unlabeled, *spec.c2)};
    case Scope::Mixed: {
      ConstraintPart mixed;
      mixed.X.resize(labeled.X.rows() + unlabeled.X.rows(), labeled.X.cols());
      mixed.X << labeled.X, unlabeled.X;
      mixed.z.resize(labeled.z.size() + unlabeled.z.size());
      mixed.z << labeled.z, unlabeled.z;
      if (spec.metric != Metric::DisparateImpact) {
        mixed.y_signed.resize(labeled.y_signed.size() +
                              unlabeled.y_signed.size());
        mixed.y_signed << labeled.y_signed, unlabeled.y_signed;
      }
      return {eval_part(mixed, spec.c)};
    }
  }
  throw InvalidArgument("unknown scope");
}

/// Empirical per-group rates and their absolute difference. y_true may be
/// empty for DisparateImpact.
inline DiscriminationReport discrimination_level(Metric metric,
                                                 const IntVector& y_hat,
                                                 const IntVector& y_true,
                                                 const IntVector& z) {
  if (y_hat.size() != z.size())
    throw InvalidArgument("discrimination_level: length mismatch");
  if (metric != Metric::DisparateImpact && y_true.size() != y_hat.size())
    throw InvalidArgument("discrimination_level: labels required for " +
                          metric_name(metric));
  double rate[2];
  for (int group = 0; group < 2; ++group) {
    Index hits = 0, total = 0;
    for (Index i = 0; i < z.size(); ++i) {
      if (z(i) != group) continue;
      switch (metric) {
        case Metric::DisparateImpact:
          ++total;
          hits += y_hat(i) == 1;
          break;
        case Metric::Omr:
          ++total;
          hits += y_hat(i) != y_true(i);
          break;
        case Metric::Fpr:
          if (y_true(i) == 0) {
            ++total;
            hits += y_hat(i) != y_true(i);
          }
          break;
        case Metric::Fnr:
          if (y_true(i) == 1) {
            ++total;
            hits += y_hat(i) != y_true(i);
          }
          break;
      }
    }
    if (total == 0)
      throw InvalidArgument(
          "discrimination_level(" + metric_name(metric) + "): group z=" +
          std::to_string(group) +
          (metric == Metric::Fpr
               ? " has no y=0 rows"
               : metric == Metric::Fnr ? " has no y=1 rows" : " is empty"));
    rate[group] = static_cast<double>(hits) / static_cast<double>(total);
  }
  return {metric, rate[0], rate[1], std::abs(rate[0] - rate[1])};
}

/// Test-set accuracy helper used across the harness and baselines.
inline double accuracy(const IntVector& y_hat, const IntVector& y_true) {
  if (y_hat.size() != y_true.size() || y_hat.size() == 0)
    throw InvalidArgument("accuracy: length mismatch");
  return (y_hat.array() == y_true.array()).cast<double>().mean();
}

}  // namespace fairssl

#endif  // FAIRSSL_FAIRNESS_HPP
