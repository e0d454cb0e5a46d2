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

#include "dpe/metric.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dpe/kernels.h"

namespace dpe {

double EuclideanMetric::Distance(std::span<const double> u,
                                 std::span<const double> v) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double d = u[k] - v[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

void EuclideanMetric::DistanceGradient(std::span<const double> u,
                                       std::span<const double> v,
                                       std::span<double> grad) const {
  const double d = Distance(u, v);
  for (std::size_t k = 0; k < u.size(); ++k) {
    grad[k] = d < kernels::kCoincidentDistance ? 0.0 : (u[k] - v[k]) / d;
  }
}

absl::StatusOr<double> PairwiseDistance(std::span<const double> u,
                                        std::span<const double> v) {
  if (u.size() != v.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "distance between rows of length %d and %d", u.size(), v.size()));
  }
  return EuclideanMetric().Distance(u, v);
}

absl::StatusOr<double> DistanceSumQuery(const Matrix& dataset, std::size_t i) {
  if (dataset.rows() < 2) {
    return absl::InvalidArgumentError(
        "distance-sum query needs at least two trajectories");
  }
  if (i >= dataset.rows()) {
    return absl::OutOfRangeError(absl::StrFormat(
        "index %d out of range for %d trajectories", i, dataset.rows()));
  }
  const EuclideanMetric metric;
  double acc = 0.0;
  for (std::size_t j = 0; j < dataset.rows(); ++j) {
    if (j != i) acc += metric.Distance(dataset.row(i), dataset.row(j));
  }
  return acc;
}

absl::StatusOr<DistanceSums> AllDistanceSums(const Matrix& dataset) {
  if (dataset.rows() < 2) {
    return absl::InvalidArgumentError(
        "distance sums need at least two trajectories");
  }
  DistanceSums out;
  out.sums.resize(dataset.rows());
  kernels::RowSums(kernels::PairwiseDistances(dataset), out.sums);
  return out;
}

absl::StatusOr<DistanceSums> AllDistanceSums(const Matrix& dataset,
                                             const TrajectoryMetric& metric) {
  if (dataset.rows() < 2) {
    return absl::InvalidArgumentError(
        "distance sums need at least two trajectories");
  }
  DistanceSums out;
  out.metric_name = std::string(metric.name());
  out.sums.assign(dataset.rows(), 0.0);
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    for (std::size_t j = 0; j < dataset.rows(); ++j) {
      if (j != i) out.sums[i] += metric.Distance(dataset.row(i), dataset.row(j));
    }
  }
  return out;
}

absl::StatusOr<Sensitivity> GlobalSensitivity(const Scope& scope,
                                              std::size_t n,
                                              double time_scale) {
  if (n < 1) return absl::InvalidArgumentError("point count must be >= 1");
  if (!(scope.r >= 0.0) || !(scope.tau >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("scope radius %g and time span %g must be >= 0",
                        scope.r, scope.tau));
  }
  if (!(time_scale > 0.0)) {
    return absl::InvalidArgumentError("time_scale must be positive");
  }
  Sensitivity s;
  s.r = scope.r;
  s.tau = time_scale * scope.tau;
  s.n = n;
  s.lambda = std::sqrt(static_cast<double>(n) *
                       (4.0 * s.r * s.r + s.tau * s.tau));
  return s;
}

}  // namespace dpe
