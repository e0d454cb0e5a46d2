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

#include "dpe/kernels.h"

#include <cmath>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dpe::kernels {
namespace {

// The per-row bodies are shared so the serial and parallel variants differ
// only in how rows are scheduled.

inline double RowDistance(std::span<const double> u, std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double d = u[k] - v[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline void DistanceRow(const Matrix& points, std::size_t i, Matrix& out) {
  for (std::size_t j = i + 1; j < points.rows(); ++j) {
    const double d = RowDistance(points.row(i), points.row(j));
    out(i, j) = d;
    out(j, i) = d;
  }
}

inline double RowSum(const Matrix& distances, std::size_t i) {
  double acc = 0.0;
  for (std::size_t j = 0; j < distances.cols(); ++j) {
    if (j != i) acc += distances(i, j);
  }
  return acc;
}

inline double StressRow(const Matrix& target, const Matrix& current,
                        std::size_t i) {
  double acc = 0.0;
  for (std::size_t j = i + 1; j < target.cols(); ++j) {
    const double r = target(i, j) - current(i, j);
    acc += r * r;
  }
  return acc;
}

inline void StressGradientRow(const Matrix& points, const Matrix& target,
                              const Matrix& current, std::size_t i,
                              Matrix& grad) {
  auto g = grad.row(i);
  for (double& v : g) v = 0.0;
  const auto yi = points.row(i);
  for (std::size_t j = 0; j < points.rows(); ++j) {
    const double d = current(i, j);
    if (j == i || d < kCoincidentDistance) continue;
    const double c = 2.0 * (d - target(i, j)) / d;
    const auto yj = points.row(j);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += c * (yi[k] - yj[k]);
  }
}

inline void SumResidualGradientRow(const Matrix& points, const Matrix& current,
                                   std::span<const double> residuals,
                                   double scale, std::size_t i, Matrix& grad) {
  auto g = grad.row(i);
  for (double& v : g) v = 0.0;
  const auto yi = points.row(i);
  for (std::size_t j = 0; j < points.rows(); ++j) {
    const double d = current(i, j);
    if (j == i || d < kCoincidentDistance) continue;
    const double c = scale * (residuals[i] + residuals[j]) / d;
    const auto yj = points.row(j);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += c * (yi[k] - yj[k]);
  }
}

inline void AffineRow(const Matrix& weights, std::span<const double> bias,
                      const Matrix& in, std::size_t i, Matrix& out) {
  const auto x = in.row(i);
  auto y = out.row(i);
  for (std::size_t r = 0; r < weights.rows(); ++r) {
    const auto w = weights.row(r);
    double acc = bias.empty() ? 0.0 : bias[r];
    for (std::size_t c = 0; c < w.size(); ++c) acc += w[c] * x[c];
    y[r] = acc;
  }
}

inline void TransposedRow(const Matrix& weights, const Matrix& in,
                          std::size_t i, Matrix& out) {
  const auto x = in.row(i);
  auto y = out.row(i);
  for (double& v : y) v = 0.0;
  for (std::size_t r = 0; r < weights.rows(); ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    const auto w = weights.row(r);
    for (std::size_t c = 0; c < w.size(); ++c) y[c] += w[c] * xr;
  }
}

using Index = std::ptrdiff_t;

}  // namespace

int MaxThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Matrix PairwiseDistances(const Matrix& points) {
  const Index m = static_cast<Index>(points.rows());
  Matrix out(points.rows(), points.rows());
#pragma omp parallel for schedule(dynamic, 4)
  for (Index i = 0; i < m; ++i) DistanceRow(points, i, out);
  return out;
}

void RowSums(const Matrix& distances, std::span<double> sums) {
  const Index m = static_cast<Index>(distances.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < m; ++i) sums[i] = RowSum(distances, i);
}

double StressLoss(const Matrix& target, const Matrix& current) {
  const Index m = static_cast<Index>(target.rows());
  std::vector<double> partial(target.rows());
#pragma omp parallel for schedule(dynamic, 4)
  for (Index i = 0; i < m; ++i) partial[i] = StressRow(target, current, i);
  double acc = 0.0;
  for (double p : partial) acc += p;
  return acc;
}

void StressGradient(const Matrix& points, const Matrix& target,
                    const Matrix& current, Matrix& grad) {
  const Index m = static_cast<Index>(points.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < m; ++i) {
    StressGradientRow(points, target, current, i, grad);
  }
}

void SumResidualGradient(const Matrix& points, const Matrix& current,
                         std::span<const double> residuals, double scale,
                         Matrix& grad) {
  const Index m = static_cast<Index>(points.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < m; ++i) {
    SumResidualGradientRow(points, current, residuals, scale, i, grad);
  }
}

void AffineRows(const Matrix& weights, std::span<const double> bias,
                const Matrix& in, Matrix& out) {
  const Index m = static_cast<Index>(in.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < m; ++i) AffineRow(weights, bias, in, i, out);
}

void TransposedRows(const Matrix& weights, const Matrix& in, Matrix& out) {
  const Index m = static_cast<Index>(in.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < m; ++i) TransposedRow(weights, in, i, out);
}

namespace serial {

Matrix PairwiseDistances(const Matrix& points) {
  Matrix out(points.rows(), points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) DistanceRow(points, i, out);
  return out;
}

void RowSums(const Matrix& distances, std::span<double> sums) {
  for (std::size_t i = 0; i < distances.rows(); ++i) {
    sums[i] = RowSum(distances, i);
  }
}

double StressLoss(const Matrix& target, const Matrix& current) {
  double acc = 0.0;
  for (std::size_t i = 0; i < target.rows(); ++i) {
    acc += StressRow(target, current, i);
  }
  return acc;
}

void StressGradient(const Matrix& points, const Matrix& target,
                    const Matrix& current, Matrix& grad) {
  for (std::size_t i = 0; i < points.rows(); ++i) {
    StressGradientRow(points, target, current, i, grad);
  }
}

void SumResidualGradient(const Matrix& points, const Matrix& current,
                         std::span<const double> residuals, double scale,
                         Matrix& grad) {
  for (std::size_t i = 0; i < points.rows(); ++i) {
    SumResidualGradientRow(points, current, residuals, scale, i, grad);
  }
}

void AffineRows(const Matrix& weights, std::span<const double> bias,
                const Matrix& in, Matrix& out) {
  for (std::size_t i = 0; i < in.rows(); ++i) {
    AffineRow(weights, bias, in, i, out);
  }
}

void TransposedRows(const Matrix& weights, const Matrix& in, Matrix& out) {
  for (std::size_t i = 0; i < in.rows(); ++i) TransposedRow(weights, in, i, out);
}

}  // namespace serial
}  // namespace dpe::kernels
