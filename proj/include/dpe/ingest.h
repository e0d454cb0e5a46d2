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

// Parsing, projection, alignment and flattening of trajectory datasets.

#ifndef DPE_INGEST_H_
#define DPE_INGEST_H_

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpe/matrix.h"

namespace dpe {

inline constexpr double kEarthRadiusMeters = 6371000.0;

enum class CoordinateFormat { kCsvXy, kCsvLatLon };

absl::StatusOr<CoordinateFormat> ParseCoordinateFormat(const std::string& s);
const char* CoordinateFormatName(CoordinateFormat format);

// A sample as read from the input. For kCsvLatLon `first` is latitude and
// `second` longitude (degrees); for kCsvXy they are x and y in meters.
struct RawPoint {
  double first = 0.0;
  double second = 0.0;
  double t = 0.0;
};

struct RawTrajectory {
  std::string id;
  std::vector<RawPoint> points;
};

// Planar sample: meters and seconds.
struct SamplePoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;

  friend bool operator==(const SamplePoint&, const SamplePoint&) = default;
};

struct Trajectory {
  std::string id;
  std::vector<SamplePoint> points;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Bounding box and time span of a dataset. `r` is half the diagonal of the
// bounding box and `tau` the time span.
struct Scope {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double r = 0.0;
  double tau = 0.0;

  bool Contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

// Computes the scope over every point. `trajectories` must contain at least
// one point.
Scope ComputeScope(const std::vector<Trajectory>& trajectories);

struct Rejection {
  std::string id;
  std::string reason;
};

struct ParseResult {
  std::vector<RawTrajectory> trajectories;  // order of first appearance
  std::vector<Rejection> rejected;
};

// Reads `traj_id,x,y,t` (kCsvXy) or `traj_id,lat,lon,t` (kCsvLatLon) CSV with
// a mandatory header. Rows of one id may be interleaved with other ids.
// Trajectories whose timestamps decrease are dropped and listed in
// `rejected` unless `reject_decreasing_time` is false; a malformed row fails
// the whole parse with its line number.
absl::StatusOr<ParseResult> ParseDataset(std::istream& source,
                                         CoordinateFormat format,
                                         bool reject_decreasing_time = true);

// Inverse information for mapping planar coordinates back to the input
// frame on export.
struct Projection {
  CoordinateFormat format = CoordinateFormat::kCsvXy;
  double lat0_deg = 0.0;
  double lon0_deg = 0.0;
  double t_offset = 0.0;  // original t = projected t + t_offset
};

struct ProjectedDataset {
  std::vector<Trajectory> trajectories;
  Scope scope;
  Projection projection;
};

// Equirectangular projection about the centroid for lat/lon input,
// pass-through for planar input. Timestamps are shifted so t_min = 0.
absl::StatusOr<ProjectedDataset> Project(const std::vector<RawTrajectory>& raw,
                                         CoordinateFormat format);

// Forward map of a single point with a known projection.
SamplePoint ProjectPoint(const Projection& projection, const RawPoint& p);

// Projects a second dataset into the frame of `projection`, e.g. synthetic
// output read back for evaluation. Empty trajectories are dropped.
std::vector<Trajectory> ProjectWith(const std::vector<RawTrajectory>& raw,
                                    const Projection& projection);

// Maps a planar point back to the input frame (lat/lon or x/y, original t).
RawPoint Unproject(const Projection& projection, const SamplePoint& p);

struct AlignedDataset {
  std::vector<Trajectory> trajectories;
  std::size_t n = 0;
  Scope scope;
};

// Pads every trajectory to the longest length by repeating its first point
// floor(l/2) times at the front and its last point ceil(l/2) times at the
// back, where l is the length deficit.
absl::StatusOr<AlignedDataset> Align(std::vector<Trajectory> trajectories);

// Row i = (x1, y1, s*t1, ..., xn, yn, s*tn) with s = time_scale.
absl::StatusOr<Matrix> Flatten(const AlignedDataset& dataset,
                               double time_scale = 1.0);

// Inverse of Flatten. Ids are taken from `ids` when its size matches the row
// count, otherwise rows are named by index.
absl::StatusOr<std::vector<Trajectory>> Unflatten(
    const Matrix& rows, double time_scale = 1.0,
    const std::vector<std::string>& ids = {});

// Writes trajectories in the input schema of `projection.format`.
void WriteDatasetCsv(std::ostream& out,
                     const std::vector<Trajectory>& trajectories,
                     const Projection& projection);

}  // namespace dpe

#endif  // DPE_INGEST_H_
