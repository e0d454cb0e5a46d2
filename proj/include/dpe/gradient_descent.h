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

#ifndef DPE_GRADIENT_DESCENT_H_
#define DPE_GRADIENT_DESCENT_H_

#include <functional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpe/matrix.h"

namespace dpe {

struct DescentOptions {
  double learning_rate = 0.005;
  int max_iters = 500;
  // Stop once 0 <= (previous - current) / previous < tolerance.
  double tolerance = 1e-9;
  std::string stage = "optimizer";  // used in error messages
};

struct DescentResult {
  Matrix best;  // lowest-loss iterate seen, including the start
  double best_loss = 0.0;
  std::vector<double> loss_trace;  // loss_trace[0] is the starting loss
  int iterations = 0;
};

// Evaluates the loss at `point` and writes its gradient into `grad`.
using Objective = std::function<double(const Matrix& point, Matrix& grad)>;

// Fixed-step gradient descent. A non-finite loss aborts with the stage name,
// iteration and learning rate.
absl::StatusOr<DescentResult> GradientDescent(Matrix start,
                                              const DescentOptions& options,
                                              const Objective& objective);

}  // namespace dpe

#endif  // DPE_GRADIENT_DESCENT_H_
