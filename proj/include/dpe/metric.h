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

// Trajectory metric, per-trajectory distance-sum query and its global
// sensitivity.

#ifndef DPE_METRIC_H_
#define DPE_METRIC_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dpe/ingest.h"
#include "dpe/matrix.h"

namespace dpe {

// A metric on flattened trajectories. The optimizers need the first
// derivative, so implementations must provide it.
class TrajectoryMetric {
 public:
  virtual ~TrajectoryMetric() = default;

  virtual std::string_view name() const = 0;
  virtual double Distance(std::span<const double> u,
                          std::span<const double> v) const = 0;
  // Writes d Distance(u, v) / du into `grad`.
  virtual void DistanceGradient(std::span<const double> u,
                                std::span<const double> v,
                                std::span<double> grad) const = 0;
};

class EuclideanMetric final : public TrajectoryMetric {
 public:
  std::string_view name() const override { return "euclidean"; }
  double Distance(std::span<const double> u,
                  std::span<const double> v) const override;
  // Zero when u and v coincide.
  void DistanceGradient(std::span<const double> u, std::span<const double> v,
                        std::span<double> grad) const override;
};

struct DistanceSums {
  std::vector<double> sums;
  std::string metric_name = "euclidean";
};

struct Sensitivity {
  double lambda = 0.0;
  double r = 0.0;
  double tau = 0.0;  // already multiplied by the time scale
  std::size_t n = 0;
};

absl::StatusOr<double> PairwiseDistance(std::span<const double> u,
                                        std::span<const double> v);

// Sum of distances from row i to every other row.
absl::StatusOr<double> DistanceSumQuery(const Matrix& dataset, std::size_t i);

// All m distance sums from one pairwise matrix.
absl::StatusOr<DistanceSums> AllDistanceSums(const Matrix& dataset);

// Same, for an arbitrary metric (serial double loop).
absl::StatusOr<DistanceSums> AllDistanceSums(const Matrix& dataset,
                                             const TrajectoryMetric& metric);

// lambda = sqrt(n * (4 r^2 + (time_scale * tau)^2)).
absl::StatusOr<Sensitivity> GlobalSensitivity(const Scope& scope,
                                              std::size_t n,
                                              double time_scale = 1.0);

}  // namespace dpe

#endif  // DPE_METRIC_H_
