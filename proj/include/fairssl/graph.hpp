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

#ifndef FAIRSSL_GRAPH_HPP
#define FAIRSSL_GRAPH_HPP

#include "fairssl/common.hpp"

namespace fairssl {

/// Fully-connected Gaussian similarity graph over the training rows
/// (labeled rows first) and its Laplacian U = D - adjacency, with the four
/// blocks split after row/column `block_index`.
struct GraphLaplacian {
  Matrix adjacency;   // symmetric, entries in (0,1], unit diagonal
  Vector degree;      // row sums of the adjacency
  Matrix laplacian;   // D - adjacency; row sums 0, PSD
  Index block_index;  // number of labeled rows K_l
  double sigma;

  Index size() const { return adjacency.rows(); }
  Index n_unlabeled() const { return size() - block_index; }

  auto u_ll() const {
    return laplacian.topLeftCorner(block_index, block_index);
  }
  auto u_lu() const {
    return laplacian.topRightCorner(block_index, n_unlabeled());
  }
  auto u_ul() const {
    return laplacian.bottomLeftCorner(n_unlabeled(), block_index);
  }
  auto u_uu() const {
    return laplacian.bottomRightCorner(n_unlabeled(), n_unlabeled());
  }
};

/// exp(-|xi - xj|^2 / sigma^2), in (0,1].
inline double gaussian_similarity(const Vector& xi, const Vector& xj,
                                  double sigma) {
  if (sigma <= 0.0) throw InvalidArgument("gaussian_similarity: sigma <= 0");
  if (xi.size() != xj.size())
    throw InvalidArgument("gaussian_similarity: length mismatch");
  return std::exp(-(xi - xj).squaredNorm() / (sigma * sigma));
}

/// Dense graph over X (rows ordered labeled-first). Deterministic.
inline GraphLaplacian build_laplacian(const Matrix& X, Index n_labeled,
                                      double sigma) {
  if (sigma <= 0.0) throw InvalidArgument("build_laplacian: sigma <= 0");
  if (n_labeled < 1 || n_labeled >= X.rows())
    throw InvalidArgument(
        "build_laplacian: need at least one labeled and one unlabeled row");
  if (!X.allFinite())
    throw InvalidArgument("build_laplacian: non-finite feature value");

  const Index k = X.rows();
  // Pairwise squared distances via the Gram matrix.
  const Vector sq = X.rowwise().squaredNorm();
  Matrix d2 = sq.replicate(1, k) + sq.transpose().replicate(k, 1) -
              2.0 * (X * X.transpose());
  d2 = d2.cwiseMax(0.0);  // clamp the tiny negatives cancellation leaves

  GraphLaplacian g;
  g.sigma = sigma;
  g.block_index = n_labeled;
  g.adjacency = (-d2 / (sigma * sigma)).array().exp().matrix();
  g.adjacency = 0.5 * (g.adjacency + g.adjacency.transpose()).eval();
  g.adjacency.diagonal().setOnes();
  g.degree = g.adjacency.rowwise().sum();
  g.laplacian = -g.adjacency;
  g.laplacian.diagonal() += g.degree;
  return g;
}

}  // namespace fairssl

#endif  // FAIRSSL_GRAPH_HPP
