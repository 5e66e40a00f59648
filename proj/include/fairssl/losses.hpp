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

#ifndef FAIRSSL_LOSSES_HPP
#define FAIRSSL_LOSSES_HPP

#include <utility>

#include "fairssl/common.hpp"

namespace fairssl {

enum class ModelKind { LogisticRegression, Svm };

/// Classifier weights; the last entry is the intercept. All matrices the
/// loss functions see carry the matching intercept column of ones.
struct ModelParams {
  Vector w;

  void validate() const {
    if (!w.allFinite()) throw InvalidArgument("model params not finite");
  }
};

constexpr double kProbClip = 1e-12;

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

inline Vector sigmoid(const Vector& t) {
  Vector p(t.size());
  for (Index i = 0; i < t.size(); ++i) p(i) = sigmoid(t(i));
  return p;
}

/// Summed cross-entropy and its gradient X^T (p - y). Continuous y in [0,1]
/// is allowed; probabilities are clipped away from {0,1} inside the logs.
inline std::pair<double, Vector> lr_loss_grad(const ModelParams& params,
                                              const Matrix& X,
                                              const Vector& y) {
  if (X.cols() != params.w.size())
    throw InvalidArgument("lr_loss_grad: X columns != weight length");
  if (X.rows() != y.size())
    throw InvalidArgument("lr_loss_grad: X rows != label length");
  const Vector p = sigmoid((X * params.w).eval());
  const Vector pc =
      p.array().max(kProbClip).min(1.0 - kProbClip).matrix();
  const double loss =
      -(y.array() * pc.array().log() +
        (1.0 - y.array()) * (1.0 - pc.array()).log())
           .sum();
  Vector grad = X.transpose() * (p - y);
  return {loss, std::move(grad)};
}

/// Mean hinge loss (1/K) sum max(0, 1 - y m) for y in {-1,+1} and a
/// subgradient (kinks take the zero branch).
inline std::pair<double, Vector> svm_loss_subgrad(const ModelParams& params,
                                                  const Matrix& X,
                                                  const Vector& y_signed) {
  if (X.cols() != params.w.size())
    throw InvalidArgument("svm_loss_subgrad: X columns != weight length");
  if (X.rows() != y_signed.size())
    throw InvalidArgument("svm_loss_subgrad: X rows != label length");
  const double k = static_cast<double>(X.rows());
  const Vector margins = X * params.w;
  double loss = 0.0;
  Vector coeff = Vector::Zero(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    const double h = 1.0 - y_signed(i) * margins(i);
    if (h > 0.0) {
      loss += h;
      coeff(i) = -y_signed(i) / k;
    }
  }
  return {loss / k, X.transpose() * coeff};
}

struct Prediction {
  Vector scores;     // LR: probabilities; SVM: margins
  IntVector labels;  // 0/1
};

/// Deterministic labels: LR compares p >= T, SVM compares margin >= 0
/// (ties map to label 1).
inline Prediction predict(const ModelParams& params, const Matrix& X,
                          ModelKind model, double threshold) {
  if (X.cols() != params.w.size())
    throw InvalidArgument("predict: X columns != weight length");
  Prediction out;
  const Vector margins = X * params.w;
  if (model == ModelKind::LogisticRegression) {
    if (threshold <= 0.0 || threshold >= 1.0)
      throw InvalidArgument("predict: threshold must be in (0,1)");
    out.scores = sigmoid(margins);
    out.labels.resize(X.rows());
    for (Index i = 0; i < X.rows(); ++i)
      out.labels(i) = out.scores(i) >= threshold ? 1 : 0;
  } else {
    out.scores = margins;
    out.labels.resize(X.rows());
    for (Index i = 0; i < X.rows(); ++i)
      out.labels(i) = margins(i) >= 0.0 ? 1 : 0;
  }
  return out;
}

}  // namespace fairssl

#endif  // FAIRSSL_LOSSES_HPP
