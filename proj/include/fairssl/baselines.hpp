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

#ifndef FAIRSSL_BASELINES_HPP
#define FAIRSSL_BASELINES_HPP

#include <algorithm>
#include <array>
#include <vector>

#include "fairssl/common.hpp"
#include "fairssl/dataset.hpp"

namespace fairssl {

namespace detail {

/// Rows per (group, class) cell; the resampling target is round(K/4).
inline std::array<std::vector<Index>, 4> group_class_cells(const Dataset& d) {
  if (!d.labels) throw InvalidArgument("resampling: labels required");
  std::array<std::vector<Index>, 4> cells;
  for (Index i = 0; i < d.rows(); ++i)
    cells[2 * d.sensitive(i) + (*d.labels)(i)].push_back(i);
  for (const auto& cell : cells)
    if (cell.empty())
      throw InvalidArgument("resampling: empty (group, class) cell");
  return cells;
}

inline Index cell_target(Index k) {
  return static_cast<Index>(std::llround(static_cast<double>(k) / 4.0));
}

}  // namespace detail

/// Uniform sampling baseline: every (group, class) cell is brought to
/// round(K/4) rows, undersampling uniformly without replacement and
/// oversampling with replacement. Deterministic in the seed.
inline Dataset uniform_sampling(const Dataset& labeled, std::uint64_t seed) {
  const auto cells = detail::group_class_cells(labeled);
  const Index target = detail::cell_target(labeled.rows());
  Rng rng = make_rng(seed);
  std::vector<Index> out;
  for (const auto& cell : cells) {
    const Index n = static_cast<Index>(cell.size());
    if (n == target) {
      out.insert(out.end(), cell.begin(), cell.end());
    } else if (n > target) {
      std::vector<Index> pick = cell;
      shuffle(pick, rng);
      pick.resize(target);
      std::sort(pick.begin(), pick.end());
      out.insert(out.end(), pick.begin(), pick.end());
    } else {
      out.insert(out.end(), cell.begin(), cell.end());
      for (Index j = n; j < target; ++j)
        out.push_back(cell[uniform_below(rng, cell.size())]);
    }
  }
  return labeled.take(out);
}

/// Preferential sampling baseline: same cell targets, but duplication and
/// removal are ordered by distance to the decision boundary of the given
/// ranking scores (additions duplicate the closest points, removals delete
/// them). Ties keep the original row order.
inline Dataset preferential_sampling(const Dataset& labeled,
                                     const Vector& scores,
                                     std::uint64_t /*seed*/) {
  if (scores.size() != labeled.rows())
    throw InvalidArgument("preferential_sampling: score length mismatch");
  const auto cells = detail::group_class_cells(labeled);
  const Index target = detail::cell_target(labeled.rows());
  std::vector<Index> out;
  for (const auto& cell : cells) {
    std::vector<Index> order = cell;
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return std::abs(scores(a)) < std::abs(scores(b));
    });
    const Index n = static_cast<Index>(order.size());
    if (n >= target) {
      // drop the boundary-closest rows
      out.insert(out.end(), order.begin() + (n - target), order.end());
    } else {
      out.insert(out.end(), cell.begin(), cell.end());
      for (Index j = 0; j < target - n; ++j)
        out.push_back(order[j % order.size()]);
    }
  }
  return labeled.take(out);
}

}  // namespace fairssl

#endif  // FAIRSSL_BASELINES_HPP
