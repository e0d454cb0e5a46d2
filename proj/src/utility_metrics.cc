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

#include "dpe/utility_metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace dpe {
namespace {

constexpr double kSumTolerance = 1e-9;

absl::Status CheckNonEmpty(const std::vector<Trajectory>& original,
                           const std::vector<Trajectory>& synthetic) {
  if (original.empty()) return absl::InvalidArgumentError("original is empty");
  if (synthetic.empty()) {
    return absl::InvalidArgumentError("synthetic is empty");
  }
  return absl::OkStatus();
}

// Half of sum p log2(2p / (p + q)), skipping p = 0.
double HalfKlToMixture(double p, double q) {
  return p > 0.0 ? 0.5 * p * std::log2(2.0 * p / (p + q)) : 0.0;
}

// JSD of two count tables keyed identically. Keys missing on one side count
// as zero there.
template <class Key>
absl::StatusOr<double> JsdOfCounts(const std::map<Key, std::int64_t>& a,
                                   const std::map<Key, std::int64_t>& b) {
  std::map<Key, std::pair<double, double>> joint;
  for (const auto& [k, c] : a) joint[k].first += static_cast<double>(c);
  for (const auto& [k, c] : b) joint[k].second += static_cast<double>(c);
  std::vector<double> p, q;
  p.reserve(joint.size());
  q.reserve(joint.size());
  for (const auto& [k, v] : joint) {
    p.push_back(v.first);
    q.push_back(v.second);
  }
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sp += p[i];
    sq += q[i];
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (sp > 0.0) p[i] /= sp;
    if (sq > 0.0) q[i] /= sq;
  }
  return Jsd(p, q);
}

}  // namespace

absl::StatusOr<double> Jsd(const std::vector<double>& p,
                           const std::vector<double>& q) {
  if (p.size() != q.size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("jsd: lengths differ (%d vs %d)", p.size(), q.size()));
  }
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0) || !(q[i] >= 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("jsd: negative or NaN probability at %d", i));
    }
    sp += p[i];
    sq += q[i];
  }
  if (sp == 0.0) return absl::InvalidArgumentError("jsd: p is all zero");
  if (sq == 0.0) return absl::InvalidArgumentError("jsd: q is all zero");
  if (std::fabs(sp - 1.0) > kSumTolerance ||
      std::fabs(sq - 1.0) > kSumTolerance) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "jsd: distributions must sum to 1 (got %.12g and %.12g)", sp, sq));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += HalfKlToMixture(p[i], q[i]) + HalfKlToMixture(q[i], p[i]);
  }
  return std::clamp(acc, 0.0, 1.0);
}

Histogram MakeHistogram(const std::vector<double>& values, double lo,
                        double hi, int bins) {
  Histogram h;
  h.bin_edges.resize(bins + 1);
  const double width = (hi - lo) / bins;
  for (int k = 0; k <= bins; ++k) h.bin_edges[k] = lo + k * width;
  h.bin_edges[bins] = hi;
  h.counts.assign(bins, 0);
  for (double v : values) {
    int k = width > 0.0 ? static_cast<int>(std::floor((v - lo) / width)) : 0;
    h.counts[std::clamp(k, 0, bins - 1)] += 1;
  }
  h.normalized.assign(bins, 0.0);
  if (!values.empty()) {
    for (int k = 0; k < bins; ++k) {
      h.normalized[k] = static_cast<double>(h.counts[k]) / values.size();
    }
  }
  return h;
}

double TrajectoryLength(const Trajectory& t) {
  double acc = 0.0;
  for (std::size_t k = 1; k < t.points.size(); ++k) {
    acc += std::hypot(t.points[k].x - t.points[k - 1].x,
                      t.points[k].y - t.points[k - 1].y);
  }
  return acc;
}

absl::StatusOr<GridDensity> SharedGrid(const std::vector<Trajectory>& a,
                                       const std::vector<Trajectory>& b,
                                       double cell_size) {
  if (!(cell_size > 0.0)) {
    return absl::InvalidArgumentError("cell_size must be > 0");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double x_min = kInf, x_max = -kInf, y_min = kInf, y_max = -kInf;
  for (const auto* data : {&a, &b}) {
    for (const auto& t : *data) {
      for (const auto& p : t.points) {
        x_min = std::min(x_min, p.x);
        x_max = std::max(x_max, p.x);
        y_min = std::min(y_min, p.y);
        y_max = std::max(y_max, p.y);
      }
    }
  }
  if (x_min > x_max) return absl::InvalidArgumentError("no points to grid");
  GridDensity grid;
  grid.cell_size = cell_size;
  grid.origin_x = x_min;
  grid.origin_y = y_min;
  grid.nx = static_cast<std::int64_t>(std::floor((x_max - x_min) / cell_size)) + 1;
  grid.ny = static_cast<std::int64_t>(std::floor((y_max - y_min) / cell_size)) + 1;
  return grid;
}

Cell CellOf(const GridDensity& grid, double x, double y) {
  return {static_cast<std::int64_t>(
              std::floor((x - grid.origin_x) / grid.cell_size)),
          static_cast<std::int64_t>(
              std::floor((y - grid.origin_y) / grid.cell_size))};
}

GridDensity CountPoints(const GridDensity& grid,
                        const std::vector<Trajectory>& data) {
  GridDensity out = grid;
  out.counts.clear();
  out.total = 0;
  for (const auto& t : data) {
    for (const auto& p : t.points) {
      out.counts[CellOf(grid, p.x, p.y)] += 1;
      out.total += 1;
    }
  }
  return out;
}

absl::StatusOr<double> LengthDensityError(
    const std::vector<Trajectory>& original,
    const std::vector<Trajectory>& synthetic) {
  if (auto s = CheckNonEmpty(original, synthetic); !s.ok()) return s;
  std::vector<double> lo, ls;
  lo.reserve(original.size());
  ls.reserve(synthetic.size());
  double max_len = 0.0;
  for (const auto& t : original) {
    lo.push_back(TrajectoryLength(t));
    max_len = std::max(max_len, lo.back());
  }
  for (const auto& t : synthetic) {
    ls.push_back(TrajectoryLength(t));
    max_len = std::max(max_len, ls.back());
  }
  return Jsd(MakeHistogram(lo, 0.0, max_len, kLengthBins).normalized,
             MakeHistogram(ls, 0.0, max_len, kLengthBins).normalized);
}

absl::StatusOr<double> TrajectoryDensityError(
    const std::vector<Trajectory>& original,
    const std::vector<Trajectory>& synthetic, double cell_size) {
  if (auto s = CheckNonEmpty(original, synthetic); !s.ok()) return s;
  auto grid = SharedGrid(original, synthetic, cell_size);
  if (!grid.ok()) return grid.status();
  return JsdOfCounts(CountPoints(*grid, original).counts,
                     CountPoints(*grid, synthetic).counts);
}

absl::StatusOr<double> TripError(const std::vector<Trajectory>& original,
                                 const std::vector<Trajectory>& synthetic,
                                 double cell_size) {
  if (auto s = CheckNonEmpty(original, synthetic); !s.ok()) return s;
  auto grid = SharedGrid(original, synthetic, cell_size);
  if (!grid.ok()) return grid.status();
  auto trips = [&](const std::vector<Trajectory>& data) {
    std::map<std::pair<Cell, Cell>, std::int64_t> out;
    for (const auto& t : data) {
      if (t.points.empty()) continue;
      const auto& s = t.points.front();
      const auto& e = t.points.back();
      out[{CellOf(*grid, s.x, s.y), CellOf(*grid, e.x, e.y)}] += 1;
    }
    return out;
  };
  return JsdOfCounts(trips(original), trips(synthetic));
}

absl::StatusOr<double> MseTrajectories(const Matrix& original,
                                       const Matrix& synthetic) {
  if (original.rows() != synthetic.rows() ||
      original.cols() != synthetic.cols() || original.empty()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "mse: shapes differ (%dx%d vs %dx%d)", original.rows(),
        original.cols(), synthetic.rows(), synthetic.cols()));
  }
  const auto a = original.data();
  const auto b = synthetic.data();
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    acc += (a[k] - b[k]) * (a[k] - b[k]);
  }
  return acc / static_cast<double>(a.size());
}

absl::StatusOr<double> MseTrajectories(
    const std::vector<Trajectory>& original,
    const std::vector<Trajectory>& synthetic) {
  if (original.size() != synthetic.size() || original.empty()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("mse: %d original vs %d synthetic trajectories",
                        original.size(), synthetic.size()));
  }
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const auto& a = original[i].points;
    const auto& b = synthetic[i].points;
    if (a.size() != b.size()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "mse: trajectory %d has %d vs %d points", i, a.size(), b.size()));
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
      acc += (a[k].x - b[k].x) * (a[k].x - b[k].x) +
             (a[k].y - b[k].y) * (a[k].y - b[k].y) +
             (a[k].t - b[k].t) * (a[k].t - b[k].t);
      count += 3;
    }
  }
  if (count == 0) return absl::InvalidArgumentError("mse: no points");
  return acc / static_cast<double>(count);
}

absl::StatusOr<double> MseHeatmap(const std::vector<Trajectory>& original,
                                  const std::vector<Trajectory>& synthetic,
                                  double cell_size) {
  if (auto s = CheckNonEmpty(original, synthetic); !s.ok()) return s;
  auto grid = SharedGrid(original, synthetic, cell_size);
  if (!grid.ok()) return grid.status();
  const GridDensity a = CountPoints(*grid, original);
  const GridDensity b = CountPoints(*grid, synthetic);
  std::map<Cell, std::pair<double, double>> joint;
  for (const auto& [c, n] : a.counts) {
    joint[c].first = static_cast<double>(n) / a.total;
  }
  for (const auto& [c, n] : b.counts) {
    joint[c].second = static_cast<double>(n) / b.total;
  }
  double acc = 0.0;
  for (const auto& [c, v] : joint) {
    acc += (v.first - v.second) * (v.first - v.second);
  }
  return acc / (static_cast<double>(grid->nx) * static_cast<double>(grid->ny));
}

absl::StatusOr<UtilityReport> EvaluateUtility(
    const std::vector<Trajectory>& original,
    const std::vector<Trajectory>& synthetic, double cell_size) {
  UtilityReport r;
  auto assign = [](double& field, absl::StatusOr<double> v) -> absl::Status {
    if (!v.ok()) return v.status();
    field = *v;
    return absl::OkStatus();
  };
  for (auto s : {assign(r.length_density_error,
                        LengthDensityError(original, synthetic)),
                 assign(r.trajectory_density_error,
                        TrajectoryDensityError(original, synthetic, cell_size)),
                 assign(r.trip_error, TripError(original, synthetic, cell_size)),
                 assign(r.mse_trajectories,
                        MseTrajectories(original, synthetic)),
                 assign(r.mse_heatmap,
                        MseHeatmap(original, synthetic, cell_size))}) {
    if (!s.ok()) return s;
  }
  return r;
}

void WriteHistogramCsv(std::ostream& out, const Histogram& h) {
  out << "bin_lo,bin_hi,count,probability\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    out << absl::StrFormat("%.17g,%.17g,%d,%.17g\n", h.bin_edges[k],
                           h.bin_edges[k + 1], h.counts[k], h.normalized[k]);
  }
}

void WriteHeatmapCsv(std::ostream& out, const GridDensity& grid) {
  out << "cell_x,cell_y,x_min,y_min,count,density\n";
  for (const auto& [c, n] : grid.counts) {
    out << absl::StrFormat(
        "%d,%d,%.17g,%.17g,%d,%.17g\n", c.first, c.second,
        grid.origin_x + c.first * grid.cell_size,
        grid.origin_y + c.second * grid.cell_size, n,
        grid.total > 0 ? static_cast<double>(n) / grid.total : 0.0);
  }
}

}  // namespace dpe
