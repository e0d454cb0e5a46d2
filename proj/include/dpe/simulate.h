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

// Clipped Gaussian random walks inside a box, for desk-scale experiments.

#ifndef DPE_SIMULATE_H_
#define DPE_SIMULATE_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "dpe/ingest.h"

namespace dpe {

struct SimSpec {
  std::size_t m = 500;
  std::size_t length = 100;
  double x_min = -10.0;
  double x_max = 10.0;
  double y_min = -10.0;
  double y_max = 10.0;
  double step_sigma = 0.5;
  std::uint64_t seed = 0;
};

absl::Status ValidateSimSpec(const SimSpec& spec);

// Starts are uniform in the box, steps are N(0, step_sigma^2) per axis and
// clipped to the box, timestamps are 0, 1, 2, ...
absl::StatusOr<std::vector<Trajectory>> Simulate(const SimSpec& spec);

}  // namespace dpe

#endif  // DPE_SIMULATE_H_
