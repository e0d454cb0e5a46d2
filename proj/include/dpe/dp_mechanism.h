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

// Laplace mechanism over the per-trajectory distance sums.

#ifndef DPE_DP_MECHANISM_H_
#define DPE_DP_MECHANISM_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpe/metric.h"

namespace dpe {

using RandomEngine = std::mt19937_64;

// Seed for substream `stream` of `seed`. Distinct streams of one seed are
// decorrelated, so per-index draws do not depend on evaluation order.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

// Uniform on the open interval (-1/2, 1/2), built from 53 random bits.
double CenteredUniform(RandomEngine& rng);

// One draw from the Laplace distribution with scale b by inverse CDF:
// x = -b sgn(u) ln(1 - 2|u|). Returns exactly 0 for b = 0.
double LaplaceSample(double scale, RandomEngine& rng);

double LaplaceCdf(double x, double scale);

struct PrivacyParams {
  double epsilon = 1.0;
  double lambda = 0.0;
  std::optional<std::uint64_t> seed;

  double scale() const { return lambda / epsilon; }
};

struct PerturbedSums {
  std::vector<double> sums;
  PrivacyParams params;  // seed is always set once perturbed
  std::string original_metric = "euclidean";
};

// sums[i] + Laplace(lambda / epsilon), one substream per index. An unset seed
// is drawn from the OS and recorded in the result.
absl::StatusOr<PerturbedSums> PerturbSums(const DistanceSums& sums,
                                          const PrivacyParams& params);

}  // namespace dpe

#endif  // DPE_DP_MECHANISM_H_
