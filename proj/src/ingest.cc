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

#include "dpe/ingest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include "absl/strings/string_view.h"
#include <unordered_map>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace dpe {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::vector<absl::string_view> SplitRow(absl::string_view line) {
  std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
  for (auto& f : fields) f = absl::StripAsciiWhitespace(f);
  return fields;
}

}  // namespace

absl::StatusOr<CoordinateFormat> ParseCoordinateFormat(const std::string& s) {
  if (s == "csv_xy") return CoordinateFormat::kCsvXy;
  if (s == "csv_latlon") return CoordinateFormat::kCsvLatLon;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown format '", s, "' (expected csv_xy or csv_latlon)"));
}

const char* CoordinateFormatName(CoordinateFormat format) {
  return format == CoordinateFormat::kCsvXy ? "csv_xy" : "csv_latlon";
}

Scope ComputeScope(const std::vector<Trajectory>& trajectories) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Scope s{kInf, -kInf, kInf, -kInf, kInf, -kInf, 0.0, 0.0};
  for (const auto& traj : trajectories) {
    for (const auto& p : traj.points) {
      s.x_min = std::min(s.x_min, p.x);
      s.x_max = std::max(s.x_max, p.x);
      s.y_min = std::min(s.y_min, p.y);
      s.y_max = std::max(s.y_max, p.y);
      s.t_min = std::min(s.t_min, p.t);
      s.t_max = std::max(s.t_max, p.t);
    }
  }
  // Farthest pair of bounding-box corners is always a diagonal.
  s.r = 0.5 * std::hypot(s.x_max - s.x_min, s.y_max - s.y_min);
  s.tau = s.t_max - s.t_min;
  return s;
}

absl::StatusOr<ParseResult> ParseDataset(std::istream& source,
                                         CoordinateFormat format,
                                         bool reject_decreasing_time) {
  const std::vector<absl::string_view> expected =
      format == CoordinateFormat::kCsvXy
          ? std::vector<absl::string_view>{"traj_id", "x", "y", "t"}
          : std::vector<absl::string_view>{"traj_id", "lat", "lon", "t"};

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (!have_header && std::getline(source, line)) {
    ++line_no;
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    if (SplitRow(line) != expected) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "line %d: expected header '%s'", line_no,
          absl::StrJoin(expected, ",")));
    }
    have_header = true;
  }
  if (!have_header) return absl::InvalidArgumentError("empty input");

  ParseResult result;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<bool> non_monotonic;
  while (std::getline(source, line)) {
    ++line_no;
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    const auto fields = SplitRow(line);
    if (fields.size() != 4) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "line %d: expected 4 fields, got %d", line_no, fields.size()));
    }
    if (fields[0].empty()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: empty traj_id", line_no));
    }
    RawPoint p;
    double* targets[3] = {&p.first, &p.second, &p.t};
    for (int k = 0; k < 3; ++k) {
      if (!absl::SimpleAtod(fields[k + 1], targets[k]) ||
          !std::isfinite(*targets[k])) {
        return absl::InvalidArgumentError(
            absl::StrFormat("line %d: field %d ('%s') is not a finite number",
                            line_no, k + 2, fields[k + 1]));
      }
    }
    std::string id(fields[0]);
    auto [it, inserted] = index.try_emplace(id, result.trajectories.size());
    if (inserted) {
      result.trajectories.push_back(RawTrajectory{id, {}});
      non_monotonic.push_back(false);
    }
    auto& traj = result.trajectories[it->second];
    if (reject_decreasing_time && !traj.points.empty() &&
        p.t < traj.points.back().t) {
      non_monotonic[it->second] = true;
    }
    traj.points.push_back(p);
  }
  if (result.trajectories.empty()) {
    return absl::InvalidArgumentError("input has a header but no rows");
  }

  std::vector<RawTrajectory> kept;
  kept.reserve(result.trajectories.size());
  for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
    if (non_monotonic[i]) {
      result.rejected.push_back(
          {result.trajectories[i].id, "timestamps decrease"});
    } else {
      kept.push_back(std::move(result.trajectories[i]));
    }
  }
  result.trajectories = std::move(kept);
  return result;
}

absl::StatusOr<ProjectedDataset> Project(const std::vector<RawTrajectory>& raw,
                                         CoordinateFormat format) {
  std::size_t count = 0;
  double sum_first = 0.0, sum_second = 0.0;
  double t_min = std::numeric_limits<double>::infinity();
  for (const auto& traj : raw) {
    for (const auto& p : traj.points) {
      if (format == CoordinateFormat::kCsvLatLon &&
          (p.first < -90.0 || p.first > 90.0 || p.second < -180.0 ||
           p.second > 180.0)) {
        return absl::InvalidArgumentError(
            absl::StrFormat("trajectory '%s': (lat %g, lon %g) out of range",
                            traj.id, p.first, p.second));
      }
      sum_first += p.first;
      sum_second += p.second;
      t_min = std::min(t_min, p.t);
      ++count;
    }
  }
  if (count == 0) return absl::InvalidArgumentError("no points to project");

  ProjectedDataset out;
  out.projection.format = format;
  out.projection.t_offset = t_min;
  if (format == CoordinateFormat::kCsvLatLon) {
    out.projection.lat0_deg = sum_first / count;
    out.projection.lon0_deg = sum_second / count;
  }
  out.trajectories = ProjectWith(raw, out.projection);
  out.scope = ComputeScope(out.trajectories);
  return out;
}

SamplePoint ProjectPoint(const Projection& projection, const RawPoint& p) {
  SamplePoint q;
  q.t = p.t - projection.t_offset;
  if (projection.format == CoordinateFormat::kCsvLatLon) {
    const double cos_lat0 = std::cos(projection.lat0_deg * kDegToRad);
    q.x = kEarthRadiusMeters * (p.second - projection.lon0_deg) * kDegToRad *
          cos_lat0;
    q.y = kEarthRadiusMeters * (p.first - projection.lat0_deg) * kDegToRad;
  } else {
    q.x = p.first;
    q.y = p.second;
  }
  return q;
}

std::vector<Trajectory> ProjectWith(const std::vector<RawTrajectory>& raw,
                                    const Projection& projection) {
  std::vector<Trajectory> out;
  out.reserve(raw.size());
  for (const auto& traj : raw) {
    if (traj.points.empty()) continue;
    Trajectory projected{traj.id, {}};
    projected.points.reserve(traj.points.size());
    for (const auto& p : traj.points) {
      projected.points.push_back(ProjectPoint(projection, p));
    }
    out.push_back(std::move(projected));
  }
  return out;
}

RawPoint Unproject(const Projection& projection, const SamplePoint& p) {
  RawPoint q;
  q.t = p.t + projection.t_offset;
  if (projection.format == CoordinateFormat::kCsvLatLon) {
    const double cos_lat0 = std::cos(projection.lat0_deg * kDegToRad);
    q.first = projection.lat0_deg + p.y / kEarthRadiusMeters / kDegToRad;
    q.second =
        projection.lon0_deg + p.x / (kEarthRadiusMeters * cos_lat0) / kDegToRad;
  } else {
    q.first = p.x;
    q.second = p.y;
  }
  return q;
}

absl::StatusOr<AlignedDataset> Align(std::vector<Trajectory> trajectories) {
  if (trajectories.empty()) {
    return absl::InvalidArgumentError("cannot align an empty dataset");
  }
  std::size_t n = 0;
  for (const auto& traj : trajectories) {
    if (traj.points.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("trajectory '", traj.id, "' has no points"));
    }
    n = std::max(n, traj.points.size());
  }
  for (auto& traj : trajectories) {
    const std::size_t deficit = n - traj.points.size();
    if (deficit == 0) continue;
    const std::size_t front = deficit / 2;
    const std::size_t back = deficit - front;
    std::vector<SamplePoint> padded;
    padded.reserve(n);
    padded.insert(padded.end(), front, traj.points.front());
    padded.insert(padded.end(), traj.points.begin(), traj.points.end());
    padded.insert(padded.end(), back, traj.points.back());
    traj.points = std::move(padded);
  }
  AlignedDataset out;
  out.scope = ComputeScope(trajectories);
  out.n = n;
  out.trajectories = std::move(trajectories);
  return out;
}

absl::StatusOr<Matrix> Flatten(const AlignedDataset& dataset,
                               double time_scale) {
  if (!(time_scale > 0.0) || !std::isfinite(time_scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("time_scale must be positive, got ", time_scale));
  }
  const std::size_t n = dataset.n;
  Matrix rows(dataset.trajectories.size(), 3 * n);
  for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
    const auto& points = dataset.trajectories[i].points;
    if (points.size() != n) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "trajectory %d has %d points, dataset is aligned to %d", i,
          points.size(), n));
    }
    auto row = rows.row(i);
    for (std::size_t k = 0; k < n; ++k) {
      row[3 * k] = points[k].x;
      row[3 * k + 1] = points[k].y;
      row[3 * k + 2] = time_scale * points[k].t;
    }
  }
  return rows;
}

absl::StatusOr<std::vector<Trajectory>> Unflatten(
    const Matrix& rows, double time_scale,
    const std::vector<std::string>& ids) {
  if (!(time_scale > 0.0) || !std::isfinite(time_scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("time_scale must be positive, got ", time_scale));
  }
  if (rows.cols() % 3 != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "row width ", rows.cols(), " is not a multiple of 3"));
  }
  const std::size_t n = rows.cols() / 3;
  std::vector<Trajectory> out(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    out[i].id = ids.size() == rows.rows() ? ids[i] : std::to_string(i);
    out[i].points.resize(n);
    const auto row = rows.row(i);
    for (std::size_t k = 0; k < n; ++k) {
      out[i].points[k] = {row[3 * k], row[3 * k + 1],
                          row[3 * k + 2] / time_scale};
    }
  }
  return out;
}

void WriteDatasetCsv(std::ostream& out,
                     const std::vector<Trajectory>& trajectories,
                     const Projection& projection) {
  out << (projection.format == CoordinateFormat::kCsvXy ? "traj_id,x,y,t\n"
                                                        : "traj_id,lat,lon,t\n");
  for (const auto& traj : trajectories) {
    for (const auto& p : traj.points) {
      const RawPoint q = Unproject(projection, p);
      out << absl::StrFormat("%s,%.17g,%.17g,%.17g\n", traj.id, q.first,
                             q.second, q.t);
    }
  }
}

}  // namespace dpe
