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

#include "dpe/dp_mechanism.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpe {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(SplitMix64(seed) ^ SplitMix64(~stream));
}

double CenteredUniform(RandomEngine& rng) {
  // (k + 1/2) / 2^53 lies strictly inside (0, 1).
  const std::uint64_t k = rng() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53 - 0.5;
}

double LaplaceSample(double scale, RandomEngine& rng) {
  const double u = CenteredUniform(rng);
  if (scale == 0.0) return 0.0;
  const double magnitude = -scale * std::log1p(-2.0 * std::fabs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

double LaplaceCdf(double x, double scale) {
  if (x < 0.0) return 0.5 * std::exp(x / scale);
  return 1.0 - 0.5 * std::exp(-x / scale);
}

absl::StatusOr<PerturbedSums> PerturbSums(const DistanceSums& sums,
                                          const PrivacyParams& params) {
  if (!(params.epsilon > 0.0) || !std::isfinite(params.epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", params.epsilon));
  }
  if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitivity must be >= 0, got ", params.lambda));
  }
  PerturbedSums out;
  out.params = params;
  if (!out.params.seed.has_value()) {
    std::random_device entropy;
    out.params.seed = (static_cast<std::uint64_t>(entropy()) << 32) | entropy();
  }
  out.original_metric = sums.metric_name;
  out.sums.resize(sums.sums.size());
  const double scale = out.params.scale();
  for (std::size_t i = 0; i < sums.sums.size(); ++i) {
    RandomEngine rng(DeriveSeed(*out.params.seed, i));
    out.sums[i] = sums.sums[i] + LaplaceSample(scale, rng);
  }
  return out;
}

}  // namespace dpe
