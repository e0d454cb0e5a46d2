//
// Copyright 2026 The DPE Trajectory Synthesis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPE_TESTS_TEST_UTIL_H_
#define DPE_TESTS_TEST_UTIL_H_

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "dpe/ingest.h"
#include "dpe/matrix.h"

namespace dpe::testing {

inline Matrix RandomMatrix(std::size_t rows, std::size_t cols,
                           std::uint64_t seed, double lo = -5.0,
                           double hi = 5.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = u(rng);
  return m;
}

// Independent Euclidean distance, written without the kernels.
inline double BruteDistance(const Matrix& a, std::size_t i, std::size_t j) {
  double acc = 0.0;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    acc += (a(i, c) - a(j, c)) * (a(i, c) - a(j, c));
  }
  return std::sqrt(acc);
}

inline std::vector<double> BruteSums(const Matrix& a) {
  std::vector<double> sums(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.rows(); ++j) {
      if (j != i) sums[i] += BruteDistance(a, i, j);
    }
  }
  return sums;
}

// Central finite differences of `f` at `x`.
inline Matrix FiniteDifference(const std::function<double(const Matrix&)>& f,
                               const Matrix& x, double h = 1e-5) {
  Matrix grad(x.rows(), x.cols());
  Matrix probe = x;
  for (std::size_t k = 0; k < x.data().size(); ++k) {
    const double orig = probe.data()[k];
    probe.data()[k] = orig + h;
    const double up = f(probe);
    probe.data()[k] = orig - h;
    const double down = f(probe);
    probe.data()[k] = orig;
    grad.data()[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

// Per-component relative error with a unit floor on the denominator scale.
inline double MaxRelativeError(const Matrix& analytic, const Matrix& numeric) {
  double worst = 0.0;
  for (std::size_t k = 0; k < analytic.data().size(); ++k) {
    const double a = analytic.data()[k], n = numeric.data()[k];
    const double denom = std::max({std::fabs(a), std::fabs(n), 1.0});
    worst = std::max(worst, std::fabs(a - n) / denom);
  }
  return worst;
}

inline Trajectory MakeTrajectory(
    const std::string& id, const std::vector<std::array<double, 3>>& pts) {
  Trajectory t{id, {}};
  for (const auto& p : pts) t.points.push_back({p[0], p[1], p[2]});
  return t;
}

}  // namespace dpe::testing

#endif  // DPE_TESTS_TEST_UTIL_H_
