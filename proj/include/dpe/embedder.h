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

// Stress-minimizing embedding of flattened trajectories and the affine map
// from the embedding back to trajectory space.

#ifndef DPE_EMBEDDER_H_
#define DPE_EMBEDDER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "dpe/matrix.h"

namespace dpe {

enum class EmbeddingInit {
  // Uniform inside the per-axis (x, y, t) bounds of the data.
  kRandomUniformInScope,
  // The data itself when the dimensions agree, otherwise random.
  kIdentityWhenDimensionsMatch,
};

struct OptimizerConfig {
  double learning_rate = 0.005;
  int max_iters = 500;
  double tolerance = 1e-9;
  std::optional<std::uint64_t> seed;
  EmbeddingInit init = EmbeddingInit::kIdentityWhenDimensionsMatch;
};

struct EmbeddedDataset {
  Matrix points;  // m x d_prime
  std::size_t d_prime = 0;
  std::vector<double> loss_trace;
  int iterations = 0;
  std::uint64_t seed = 0;  // seed used for the random start
};

// Sum over unordered pairs of (d(T_i, T_j) - d(E_i, E_j))^2.
absl::StatusOr<double> EmbeddingLoss(const Matrix& original,
                                     const Matrix& embedded);

// Signed sum of (d(T_i, T_j) - d(E_i, E_j)) over unordered pairs.
absl::StatusOr<double> EmbeddingRawResidual(const Matrix& original,
                                            const Matrix& embedded);

// Analytic gradient of EmbeddingLoss with respect to the embedded points.
absl::StatusOr<Matrix> EmbeddingGradient(const Matrix& original,
                                         const Matrix& embedded);

absl::StatusOr<EmbeddedDataset> Embed(const Matrix& dataset,
                                      std::size_t d_prime,
                                      const OptimizerConfig& cfg);

// f(p) = weights * p + bias, weights is D x d_prime.
struct TransformFn {
  Matrix weights;
  std::vector<double> bias;
  double fit_residual = 0.0;
  bool underdetermined = false;  // fewer than d_prime + 1 points were fitted

  std::size_t input_dim() const { return weights.cols(); }
  std::size_t output_dim() const { return weights.rows(); }
};

// Least-squares affine fit from embedded rows to original rows. Returns the
// minimum-norm solution when the system is underdetermined.
absl::StatusOr<TransformFn> FitTransform(const Matrix& embedded,
                                         const Matrix& original);

absl::StatusOr<Matrix> ApplyTransform(const TransformFn& fn,
                                      const Matrix& points);

}  // namespace dpe

#endif  // DPE_EMBEDDER_H_
