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

// Pairwise inner loops shared by the distance query, the embedder and the
// synthesizer. Each kernel has an OpenMP version in `dpe::kernels` and a
// plain loop in `dpe::kernels::serial` that the tests hold it to. Work is
// split by output row and every row is accumulated in ascending index order,
// so both versions return bit-identical results for any thread count.
//
// Callers validate shapes; the kernels do not.

#ifndef DPE_KERNELS_H_
#define DPE_KERNELS_H_

#include <span>

#include "dpe/matrix.h"

namespace dpe::kernels {

// Pairs closer than this contribute nothing to distance gradients.
inline constexpr double kCoincidentDistance = 1e-12;

// Symmetric m x m Euclidean distance matrix with a zero diagonal.
Matrix PairwiseDistances(const Matrix& points);

// sums[i] = sum over j != i of distances(i, j), in ascending j.
void RowSums(const Matrix& distances, std::span<double> sums);

// Sum over i < j of (target(i, j) - current(i, j))^2.
double StressLoss(const Matrix& target, const Matrix& current);

// grad_i = sum_{j != i} 2 (current_ij - target_ij) (y_i - y_j) / current_ij.
void StressGradient(const Matrix& points, const Matrix& target,
                    const Matrix& current, Matrix& grad);

// grad_k = scale * sum_{j != k} (a_k + a_j) (y_k - y_j) / current_kj.
// This is the gradient of sum_i a_i^2 when a_i is an affine function of the
// i-th distance sum with slope scale / 2.
void SumResidualGradient(const Matrix& points, const Matrix& current,
                         std::span<const double> residuals, double scale,
                         Matrix& grad);

// out_i = weights * in_i + bias for every row (weights is rows_out x cols_in).
void AffineRows(const Matrix& weights, std::span<const double> bias,
                const Matrix& in, Matrix& out);

// out_i = weights^T * in_i for every row.
void TransposedRows(const Matrix& weights, const Matrix& in, Matrix& out);

namespace serial {

Matrix PairwiseDistances(const Matrix& points);
void RowSums(const Matrix& distances, std::span<double> sums);
double StressLoss(const Matrix& target, const Matrix& current);
void StressGradient(const Matrix& points, const Matrix& target,
                    const Matrix& current, Matrix& grad);
void SumResidualGradient(const Matrix& points, const Matrix& current,
                         std::span<const double> residuals, double scale,
                         Matrix& grad);
void AffineRows(const Matrix& weights, std::span<const double> bias,
                const Matrix& in, Matrix& out);
void TransposedRows(const Matrix& weights, const Matrix& in, Matrix& out);

}  // namespace serial

// Number of threads the parallel kernels will use.
int MaxThreads();

}  // namespace dpe::kernels

#endif  // DPE_KERNELS_H_
