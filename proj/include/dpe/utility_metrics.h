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

// Utility of a synthetic dataset relative to the original: Jensen-Shannon
// divergences of length, density and trip distributions, and MSE diagnostics.

#ifndef DPE_UTILITY_METRICS_H_
#define DPE_UTILITY_METRICS_H_

#include <cstdint>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dpe/ingest.h"
#include "dpe/matrix.h"

namespace dpe {

inline constexpr int kLengthBins = 400;
inline constexpr double kDefaultCellSize = 100.0;

// Base-2 Jensen-Shannon divergence, in [0, 1].
absl::StatusOr<double> Jsd(const std::vector<double>& p,
                           const std::vector<double>& q);

struct Histogram {
  std::vector<double> bin_edges;  // bins + 1 edges
  std::vector<std::int64_t> counts;
  std::vector<double> normalized;  // all zero when no values were binned
};

// Equal-width bins over [lo, hi]; values equal to hi land in the last bin.
Histogram MakeHistogram(const std::vector<double>& values, double lo,
                        double hi, int bins);

// Sum of consecutive xy segment lengths.
double TrajectoryLength(const Trajectory& t);

using Cell = std::pair<std::int64_t, std::int64_t>;

// Square grid anchored at (origin_x, origin_y). Cell (i, j) covers
// [origin + i * size, origin + (i + 1) * size) along each axis.
struct GridDensity {
  double cell_size = kDefaultCellSize;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::int64_t nx = 1;
  std::int64_t ny = 1;
  std::map<Cell, std::int64_t> counts;  // non-zero cells only
  std::int64_t total = 0;
};

// Grid covering the union scope of both datasets.
absl::StatusOr<GridDensity> SharedGrid(const std::vector<Trajectory>& a,
                                       const std::vector<Trajectory>& b,
                                       double cell_size);

Cell CellOf(const GridDensity& grid, double x, double y);

// Point counts of `data` on the cells of `grid`.
GridDensity CountPoints(const GridDensity& grid,
                        const std::vector<Trajectory>& data);

absl::StatusOr<double> LengthDensityError(
    const std::vector<Trajectory>& original,
    const std::vector<Trajectory>& synthetic);

absl::StatusOr<double> TrajectoryDensityError(
    const std::vector<Trajectory>& original,
    const std::vector<Trajectory>& synthetic,
    double cell_size = kDefaultCellSize);

absl::StatusOr<double> TripError(const std::vector<Trajectory>& original,
                                 const std::vector<Trajectory>& synthetic,
                                 double cell_size = kDefaultCellSize);

// Mean squared difference over all flattened components.
absl::StatusOr<double> MseTrajectories(const Matrix& original,
                                       const Matrix& synthetic);
absl::StatusOr<double> MseTrajectories(
    const std::vector<Trajectory>& original,
    const std::vector<Trajectory>& synthetic);

// Mean over all nx * ny grid cells of the squared difference in normalized
// point density.
absl::StatusOr<double> MseHeatmap(const std::vector<Trajectory>& original,
                                  const std::vector<Trajectory>& synthetic,
                                  double cell_size = kDefaultCellSize);

struct UtilityReport {
  double length_density_error = 0.0;
  double trajectory_density_error = 0.0;
  double trip_error = 0.0;
  double mse_trajectories = 0.0;
  double mse_heatmap = 0.0;
};

// All five metrics. The datasets must be index matched for the trajectory
// MSE.
absl::StatusOr<UtilityReport> EvaluateUtility(
    const std::vector<Trajectory>& original,
    const std::vector<Trajectory>& synthetic,
    double cell_size = kDefaultCellSize);

// CSV exports for plotting.
void WriteHistogramCsv(std::ostream& out, const Histogram& h);
void WriteHeatmapCsv(std::ostream& out, const GridDensity& grid);

}  // namespace dpe

#endif  // DPE_UTILITY_METRICS_H_
