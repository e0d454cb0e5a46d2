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

#include "dpe/gradient_descent.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace dpe {

absl::StatusOr<DescentResult> GradientDescent(Matrix start,
                                              const DescentOptions& options,
                                              const Objective& objective) {
  if (!(options.learning_rate > 0.0) || options.max_iters < 1 ||
      !(options.tolerance >= 0.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s: need learning_rate > 0, max_iters >= 1, tolerance >= 0 "
        "(got %g, %d, %g)",
        options.stage, options.learning_rate, options.max_iters,
        options.tolerance));
  }
  Matrix point = std::move(start);
  Matrix grad(point.rows(), point.cols());
  double loss = objective(point, grad);
  if (!std::isfinite(loss)) {
    return absl::InternalError(absl::StrFormat(
        "%s: loss is not finite at the starting point", options.stage));
  }

  DescentResult result;
  result.best = point;
  result.best_loss = loss;
  result.loss_trace.push_back(loss);

  auto step = point.data();
  for (int it = 1; it <= options.max_iters && loss > 0.0; ++it) {
    const auto g = grad.data();
    for (std::size_t k = 0; k < step.size(); ++k) {
      step[k] -= options.learning_rate * g[k];
    }
    const double next = objective(point, grad);
    if (!std::isfinite(next)) {
      return absl::InternalError(absl::StrFormat(
          "%s diverged at iteration %d with learning rate %g; try a smaller "
          "learning rate",
          options.stage, it, options.learning_rate));
    }
    result.loss_trace.push_back(next);
    result.iterations = it;
    if (next < result.best_loss) {
      result.best_loss = next;
      result.best = point;
    }
    const double improvement = (loss - next) / loss;
    loss = next;
    if (improvement >= 0.0 && improvement < options.tolerance) break;
  }
  return result;
}

}  // namespace dpe
