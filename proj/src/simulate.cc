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

#include "dpe/simulate.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "absl/status/status.h"
#include "dpe/dp_mechanism.h"

namespace dpe {

absl::Status ValidateSimSpec(const SimSpec& spec) {
  if (spec.m < 1) return absl::InvalidArgumentError("m must be >= 1");
  if (spec.length < 1) return absl::InvalidArgumentError("length must be >= 1");
  if (!(spec.x_min <= spec.x_max) || !(spec.y_min <= spec.y_max)) {
    return absl::InvalidArgumentError("simulation box min exceeds max");
  }
  if (!(spec.step_sigma >= 0.0) || !std::isfinite(spec.step_sigma)) {
    return absl::InvalidArgumentError("step_sigma must be finite and >= 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<Trajectory>> Simulate(const SimSpec& spec) {
  if (auto s = ValidateSimSpec(spec); !s.ok()) return s;
  std::vector<Trajectory> out(spec.m);
  for (std::size_t i = 0; i < spec.m; ++i) {
    // One substream per trajectory keeps trajectory i independent of m.
    RandomEngine rng(DeriveSeed(spec.seed, i));
    std::normal_distribution<double> step(0.0, 1.0);
    Trajectory& t = out[i];
    t.id = std::to_string(i);
    t.points.reserve(spec.length);
    double x = spec.x_min + (CenteredUniform(rng) + 0.5) * (spec.x_max - spec.x_min);
    double y = spec.y_min + (CenteredUniform(rng) + 0.5) * (spec.y_max - spec.y_min);
    for (std::size_t k = 0; k < spec.length; ++k) {
      if (k > 0) {
        const double dx = step(rng), dy = step(rng);
        x = std::clamp(x + spec.step_sigma * dx, spec.x_min, spec.x_max);
        y = std::clamp(y + spec.step_sigma * dy, spec.y_min, spec.y_max);
      }
      t.points.push_back({x, y, static_cast<double>(k)});
    }
  }
  return out;
}

}  // namespace dpe
