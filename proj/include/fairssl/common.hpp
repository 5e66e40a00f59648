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

#ifndef FAIRSSL_COMMON_HPP
#define FAIRSSL_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairssl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;
using Index = Eigen::Index;

/// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file or config (bad cell, missing column, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Precondition or dimension violation on an in-memory call.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative solve ran out of budget; carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (last residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// The constraint could not be met at the requested threshold c.
class InfeasibleError : public Error {
 public:
  InfeasibleError(double c, double slack)
      : Error("infeasible-at-c: constraint threshold c=" + std::to_string(c) +
              " unreachable, residual slack " + std::to_string(slack)),
        c_(c),
        slack_(slack) {}
  double c() const { return c_; }
  double slack() const { return slack_; }

 private:
  double c_;
  double slack_;
};

// ---------------------------------------------------------------------------
// Deterministic random helpers. std::mt19937_64 is bit-stable across
// platforms; the distributions below are hand-rolled because the standard
// ones are implementation-defined.
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

/// Derive an independent stream from a base seed and a counter.
inline Rng make_rng(std::uint64_t seed, std::uint64_t counter = 0) {
  std::seed_seq seq{seed, counter};
  return Rng(seq);
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

/// Standard normal via Box-Muller.
inline double normal01(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

/// Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[uniform_below(rng, i)]);
  }
}

/// Append the intercept column of ones: [X | 1].
inline Matrix with_intercept(const Matrix& X) {
  Matrix out(X.rows(), X.cols() + 1);
  out.leftCols(X.cols()) = X;
  out.col(X.cols()).setOnes();
  return out;
}

/// Map labels {0,1} -> {-1,+1}.
inline Vector to_signed_labels(const Vector& y01) {
  return 2.0 * y01.array() - 1.0;
}

}  // namespace fairssl

#endif  // FAIRSSL_COMMON_HPP
