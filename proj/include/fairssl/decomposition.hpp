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

#ifndef FAIRSSL_DECOMPOSITION_HPP
#define FAIRSSL_DECOMPOSITION_HPP

#include <functional>
#include <optional>
#include <vector>

#include "fairssl/common.hpp"
#include "fairssl/dataset.hpp"

namespace fairssl {

/// Train on one bootstrap resample of the pool, predict labels for the
/// evaluation points. Must be deterministic for a given resample.
using TrainerFn =
    std::function<IntVector(const Dataset& pool_resample, const Dataset& eval)>;

/// Per-group bias/variance/noise split of the zero-one loss, estimated over
/// bootstrap resamples. Arrays are indexed by the group code z.
struct DecompositionReport {
  double bias[2] = {0.0, 0.0};
  double variance[2] = {0.0, 0.0};
  double noise[2] = {0.0, 0.0};
  double mean_error[2] = {0.0, 0.0};  // vs the optimal prediction
  double level_decomposed = 0.0;      // |(B0-B1)+(V0-V1)+(N0-N1)|
  int n_bootstrap = 0;
  IntVector main_predictions;         // modal label per eval point
};

/// Bootstrap decomposition estimator. The optimal prediction y* is the
/// recorded ground truth unless `y_star` passes the clean labels of a
/// synthetic generator, in which case per-group noise is the empirical
/// flip rate of the observed labels. Resample r draws pool-size indices
/// with replacement from the stream (seed, r).
inline DecompositionReport estimate_decomposition(const TrainerFn& trainer,
                                                  const Dataset& pool,
                                                  const Dataset& eval,
                                                  int n_bootstrap,
                                                  std::uint64_t seed,
                                                  const IntVector* y_star = nullptr) {
  if (n_bootstrap < 2)
    throw InvalidArgument("estimate_decomposition: n_bootstrap must be >= 2");
  if (!eval.labels)
    throw InvalidArgument("estimate_decomposition: eval labels required");
  const Index n_eval = eval.rows();
  if (y_star && y_star->size() != n_eval)
    throw InvalidArgument("estimate_decomposition: y_star length mismatch");
  bool seen[2] = {false, false};
  for (Index i = 0; i < n_eval; ++i) seen[eval.sensitive(i)] = true;
  if (!seen[0] || !seen[1])
    throw InvalidArgument("estimate_decomposition: a group is absent from eval");

  const IntVector& optimal = y_star ? *y_star : *eval.labels;

  std::vector<IntVector> predictions(n_bootstrap);
  const Index n_pool = pool.rows();
  for (int r = 0; r < n_bootstrap; ++r) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
    std::vector<Index> idx(n_pool);
    for (Index i = 0; i < n_pool; ++i)
      idx[i] = static_cast<Index>(uniform_below(rng, n_pool));
    predictions[r] = trainer(pool.take(idx), eval);
    if (predictions[r].size() != n_eval)
      throw InvalidArgument("estimate_decomposition: trainer output length");
  }

  DecompositionReport rep;
  rep.n_bootstrap = n_bootstrap;
  rep.main_predictions.resize(n_eval);
  for (Index i = 0; i < n_eval; ++i) {
    int ones = 0;
    for (int r = 0; r < n_bootstrap; ++r) ones += predictions[r](i);
    // ties break toward label 1
    rep.main_predictions(i) = 2 * ones >= n_bootstrap ? 1 : 0;
  }

  Index group_count[2] = {0, 0};
  double var_sum[2] = {0.0, 0.0};
  double err_sum[2] = {0.0, 0.0};
  for (Index i = 0; i < n_eval; ++i) {
    const int z = eval.sensitive(i);
    ++group_count[z];
    const int ym = rep.main_predictions(i);
    const double cv = ym == optimal(i) ? 1.0 : -1.0;
    rep.bias[z] += ym != optimal(i) ? 1.0 : 0.0;
    if (y_star) rep.noise[z] += (*eval.labels)(i) != optimal(i) ? 1.0 : 0.0;
    for (int r = 0; r < n_bootstrap; ++r) {
      var_sum[z] += cv * (predictions[r](i) != ym ? 1.0 : 0.0);
      err_sum[z] += predictions[r](i) != optimal(i) ? 1.0 : 0.0;
    }
  }
  for (int z = 0; z < 2; ++z) {
    const double n = static_cast<double>(group_count[z]);
    rep.bias[z] /= n;
    rep.noise[z] /= n;
    rep.variance[z] = var_sum[z] / (n * n_bootstrap);
    rep.mean_error[z] = err_sum[z] / (n * n_bootstrap);
  }
  rep.level_decomposed = std::abs((rep.bias[0] - rep.bias[1]) +
                                  (rep.variance[0] - rep.variance[1]) +
                                  (rep.noise[0] - rep.noise[1]));
  return rep;
}

/// The four conditional mislabel rates of the propagated labels
/// (absent when a conditioning cell is empty) and the absolute group
/// difference of their per-group sums.
struct UnlabeledNoiseReport {
  std::optional<double> rate[2][2];  // [y][z] = Pr(pred != y | y, z)
  double group_diff = 0.0;           // |N_{1,u} - N_{0,u}|
  bool incomplete = false;           // some cell was empty

  double group_sum(int z) const {
    return rate[0][z].value_or(0.0) + rate[1][z].value_or(0.0);
  }
};

inline UnlabeledNoiseReport noise_terms_unlabeled(const IntVector& y_u_final,
                                                  const IntVector& ground_truth,
                                                  const IntVector& z) {
  if (y_u_final.size() != ground_truth.size() || y_u_final.size() != z.size())
    throw InvalidArgument("noise_terms_unlabeled: length mismatch");
  UnlabeledNoiseReport rep;
  for (int y = 0; y < 2; ++y) {
    for (int g = 0; g < 2; ++g) {
      Index total = 0, wrong = 0;
      for (Index i = 0; i < z.size(); ++i) {
        if (ground_truth(i) != y || z(i) != g) continue;
        ++total;
        wrong += y_u_final(i) != y;
      }
      if (total == 0)
        rep.incomplete = true;
      else
        rep.rate[y][g] = static_cast<double>(wrong) / static_cast<double>(total);
    }
  }
  rep.group_diff = std::abs(rep.group_sum(1) - rep.group_sum(0));
  return rep;
}

}  // namespace fairssl

#endif  // FAIRSSL_DECOMPOSITION_HPP
