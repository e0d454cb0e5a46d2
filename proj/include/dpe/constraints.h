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

// Hinge penalties for real-world constraints on synthetic trajectories. All
// penalties are evaluated on flattened trajectory rows (x, y, s*t, ...) and
// are zero exactly when nothing is violated.

#ifndef DPE_CONSTRAINTS_H_
#define DPE_CONSTRAINTS_H_

#include <optional>
#include <string>
#include <variant>

#include "absl/status/status.h"
#include "dpe/matrix.h"

namespace dpe {

// Floor on the time step of a segment when computing its speed.
inline constexpr double kMinSpeedTimeStep = 1e-3;

struct ForbiddenDisc {
  double center_x = 0.0;
  double center_y = 0.0;
  double radius = 1.0;
};

struct ForbiddenBox {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

// Points must stay inside this box.
struct ScopeBoundary {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

struct SpeedLimit {
  double v_max = 0.0;  // meters per second
};

using ConstraintGeometry =
    std::variant<ForbiddenDisc, ForbiddenBox, ScopeBoundary, SpeedLimit>;

// Closed interval of seconds.
struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;
};

struct ConstraintSpec {
  ConstraintGeometry geometry;
  std::optional<TimeWindow> time_window;  // disc/box/boundary: point time,
                                          // speed: segment start time
  double mu = 1.0;

  std::string kind() const;
};

absl::Status ValidateConstraint(const ConstraintSpec& spec);

// Unweighted penalty (mu is not applied).
double EvaluatePenalty(const ConstraintSpec& spec, const Matrix& trajectories,
                       double time_scale = 1.0);

// grad += weight * d EvaluatePenalty / d trajectories. Hinges and
// coincident points contribute a zero subgradient.
void AccumulatePenaltyGradient(const ConstraintSpec& spec,
                               const Matrix& trajectories, double time_scale,
                               double weight, Matrix& grad);

// True when the (x, y) point at time t (seconds) violates a disc or box
// constraint strictly. Always false for boundary and speed constraints.
bool InsideForbiddenRegion(const ConstraintSpec& spec, double x, double y,
                           double t);

}  // namespace dpe

#endif  // DPE_CONSTRAINTS_H_
