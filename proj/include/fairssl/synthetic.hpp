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

#ifndef FAIRSSL_SYNTHETIC_HPP
#define FAIRSSL_SYNTHETIC_HPP

#include <string>

#include "fairssl/common.hpp"
#include "fairssl/dataset.hpp"

namespace fairssl {

/// Two-Gaussian binary task with the group split exactly even and
/// independent of everything else, so both groups share one distribution.
/// `flip_rate_group1` injects label noise into group 1 only; the clean
/// labels are returned alongside for the noise path of the decomposition.
struct SyntheticSpec {
  Index n = 200;
  Index dims = 2;
  double separation = 2.0;  // distance between the class means
  double flip_rate_group1 = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Dataset data;          // labels are the (possibly flipped) observations
  IntVector clean_labels;
};

inline SyntheticData make_symmetric_gaussians(const SyntheticSpec& spec) {
  if (spec.n < 4) throw InvalidArgument("synthetic: need at least 4 rows");
  if (spec.dims < 1) throw InvalidArgument("synthetic: dims must be >= 1");
  Rng rng = make_rng(spec.seed);
  SyntheticData out;
  out.data.features.resize(spec.n, spec.dims);
  out.data.sensitive.resize(spec.n);
  out.data.labels.emplace(spec.n);
  out.clean_labels.resize(spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    const int z = static_cast<int>(i % 2);
    const int y = static_cast<int>(uniform_below(rng, 2));
    out.data.sensitive(i) = z;
    out.clean_labels(i) = y;
    const double center = (y == 1 ? 0.5 : -0.5) * spec.separation;
    out.data.features(i, 0) = center + normal01(rng);
    for (Index j = 1; j < spec.dims; ++j)
      out.data.features(i, j) = normal01(rng);
    int observed = y;
    if (z == 1 && spec.flip_rate_group1 > 0.0 &&
        uniform01(rng) < spec.flip_rate_group1)
      observed = 1 - y;
    (*out.data.labels)(i) = observed;
  }
  for (Index j = 0; j < spec.dims; ++j) {
    out.data.feature_names.push_back("x" + std::to_string(j));
    out.data.feature_kinds.push_back(ColumnKind::Numeric);
  }
  out.data.validate();
  return out;
}

}  // namespace fairssl

#endif  // FAIRSSL_SYNTHETIC_HPP
