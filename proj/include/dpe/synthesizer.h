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

// Regenerates an embedded dataset whose per-trajectory distance sums match
// the perturbed targets, with constraint penalties evaluated in trajectory
// space through the fitted transform.
//
// The objective is
//
//   L(E) = sum_i ((S_i(E) - target_i) / ((m - 1) * fit_scale))^2
//          + sum_k mu_k * P_k(f(E))
//
// where S_i is the distance sum of row i and f the affine transform. Dividing
// by m - 1 compares mean distances; fit_scale sets the units the residuals
// are measured in (1 keeps them in meters).

#ifndef DPE_SYNTHESIZER_H_
#define DPE_SYNTHESIZER_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "dpe/constraints.h"
#include "dpe/dp_mechanism.h"
#include "dpe/embedder.h"
#include "dpe/ingest.h"
#include "dpe/matrix.h"

namespace dpe {

struct SynthesisConfig {
  double learning_rate = 0.1;
  int max_iters = 500;
  double tolerance = 1e-9;
  std::optional<std::uint64_t> seed;  // recorded only; descent is deterministic
  std::vector<ConstraintSpec> constraints;
  double fit_scale = 1.0;
  double time_scale = 1.0;
};

absl::StatusOr<double> SynthesisLoss(const Matrix& candidate,
                                     const PerturbedSums& targets,
                                     const TransformFn& transform,
                                     const SynthesisConfig& cfg);

absl::StatusOr<Matrix> SynthesisGradient(const Matrix& candidate,
                                         const PerturbedSums& targets,
                                         const TransformFn& transform,
                                         const SynthesisConfig& cfg);

struct ConstraintReport {
  std::string kind;
  double mu = 0.0;
  double penalty = 0.0;  // unweighted, at the returned trajectories
};

struct SynthesisResult {
  Matrix embedded;      // m x d_prime
  Matrix trajectories;  // m x 3n flattened rows (time scaled)
  std::vector<Trajectory> dataset;
  std::vector<double> loss_trace;
  double final_loss = 0.0;
  int iterations = 0;
  std::vector<double> residuals;  // |S_i - target_i| in embedding space
  std::vector<ConstraintReport> penalties;
  double total_penalty = 0.0;  // sum of mu_k * P_k
};

// Descent starts at `embedded` and the result is mapped through `transform`.
// Only the embedding, the transform and the perturbed sums are read.
absl::StatusOr<SynthesisResult> Synthesize(const EmbeddedDataset& embedded,
                                           const PerturbedSums& targets,
                                           const TransformFn& transform,
                                           const SynthesisConfig& cfg);

}  // namespace dpe

#endif  // DPE_SYNTHESIZER_H_
