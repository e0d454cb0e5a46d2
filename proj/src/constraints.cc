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

#include "dpe/constraints.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "absl/strings/str_format.h"
#include "dpe/kernels.h"

namespace dpe {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

bool InWindow(const ConstraintSpec& spec, double t) {
  return !spec.time_window.has_value() ||
         (t >= spec.time_window->begin && t <= spec.time_window->end);
}

// Depth of (x, y) inside an open box: distance to the nearest edge along each
// axis, summed. Zero outside.
double BoxDepth(const ForbiddenBox& box, double x, double y, double* gx,
                double* gy) {
  const double left = x - box.x_min, right = box.x_max - x;
  const double low = y - box.y_min, high = box.y_max - y;
  *gx = 0.0;
  *gy = 0.0;
  if (left <= 0.0 || right <= 0.0 || low <= 0.0 || high <= 0.0) return 0.0;
  *gx = left < right ? 1.0 : -1.0;
  *gy = low < high ? 1.0 : -1.0;
  return std::min(left, right) + std::min(low, high);
}

// Penalty of one flattened row; optionally writes weight * gradient into g.
double RowPenalty(const ConstraintSpec& spec, std::span<const double> row,
                  double time_scale, double weight, std::span<double> g) {
  const std::size_t n = row.size() / 3;
  const bool want_grad = !g.empty();
  auto point_term = [&](auto&& depth_fn) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double x = row[3 * k], y = row[3 * k + 1];
      if (!InWindow(spec, row[3 * k + 2] / time_scale)) continue;
      double gx = 0.0, gy = 0.0;
      acc += depth_fn(x, y, &gx, &gy);
      if (want_grad) {
        g[3 * k] += weight * gx;
        g[3 * k + 1] += weight * gy;
      }
    }
    return acc;
  };

  return std::visit(
      Overloaded{
          [&](const ForbiddenDisc& disc) {
            return point_term([&](double x, double y, double* gx, double* gy) {
              const double dx = x - disc.center_x, dy = y - disc.center_y;
              const double dist = std::hypot(dx, dy);
              const double depth = disc.radius - dist;
              if (depth <= 0.0) return 0.0;
              if (dist >= kernels::kCoincidentDistance) {
                *gx = -dx / dist;
                *gy = -dy / dist;
              }
              return depth;
            });
          },
          [&](const ForbiddenBox& box) {
            return point_term([&](double x, double y, double* gx, double* gy) {
              return BoxDepth(box, x, y, gx, gy);
            });
          },
          [&](const ScopeBoundary& b) {
            return point_term([&](double x, double y, double* gx, double* gy) {
              double acc = 0.0;
              if (x < b.x_min) { acc += b.x_min - x; *gx = -1.0; }
              if (x > b.x_max) { acc += x - b.x_max; *gx = 1.0; }
              if (y < b.y_min) { acc += b.y_min - y; *gy = -1.0; }
              if (y > b.y_max) { acc += y - b.y_max; *gy = 1.0; }
              return acc;
            });
          },
          [&](const SpeedLimit& limit) {
            double acc = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
              const double t0 = row[3 * k + 2] / time_scale;
              if (!InWindow(spec, t0)) continue;
              const double dx = row[3 * (k + 1)] - row[3 * k];
              const double dy = row[3 * (k + 1) + 1] - row[3 * k + 1];
              const double dt = row[3 * (k + 1) + 2] / time_scale - t0;
              const double step = std::max(dt, kMinSpeedTimeStep);
              const double dist = std::hypot(dx, dy);
              const double excess = dist / step - limit.v_max;
              if (excess <= 0.0) continue;
              acc += excess;
              if (!want_grad) continue;
              if (dist >= kernels::kCoincidentDistance) {
                const double cx = weight * dx / (dist * step);
                const double cy = weight * dy / (dist * step);
                g[3 * (k + 1)] += cx;
                g[3 * k] -= cx;
                g[3 * (k + 1) + 1] += cy;
                g[3 * k + 1] -= cy;
              }
              if (dt > kMinSpeedTimeStep) {
                // d(dist/dt)/d(column) through dt = (col1 - col0) / scale.
                const double ct = -weight * dist / (dt * dt) / time_scale;
                g[3 * (k + 1) + 2] += ct;
                g[3 * k + 2] -= ct;
              }
            }
            return acc;
          },
      },
      spec.geometry);
}

}  // namespace

std::string ConstraintSpec::kind() const {
  return std::visit(Overloaded{
                        [](const ForbiddenDisc&) { return "forbidden_disc"; },
                        [](const ForbiddenBox&) { return "forbidden_box"; },
                        [](const ScopeBoundary&) { return "scope_boundary"; },
                        [](const SpeedLimit&) { return "speed_limit"; },
                    },
                    geometry);
}

absl::Status ValidateConstraint(const ConstraintSpec& spec) {
  if (!(spec.mu >= 0.0) || !std::isfinite(spec.mu)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: mu must be >= 0, got %g", spec.kind(), spec.mu));
  }
  if (spec.time_window && !(spec.time_window->begin <= spec.time_window->end)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: time window begins after it ends", spec.kind()));
  }
  return std::visit(
      Overloaded{
          [](const ForbiddenDisc& d) {
            return d.radius > 0.0 ? absl::OkStatus()
                                  : absl::InvalidArgumentError(absl::StrFormat(
                                        "forbidden_disc: radius must be > 0, "
                                        "got %g",
                                        d.radius));
          },
          [](const ForbiddenBox& b) {
            return b.x_min <= b.x_max && b.y_min <= b.y_max
                       ? absl::OkStatus()
                       : absl::InvalidArgumentError(
                             "forbidden_box: min exceeds max");
          },
          [](const ScopeBoundary& b) {
            return b.x_min <= b.x_max && b.y_min <= b.y_max
                       ? absl::OkStatus()
                       : absl::InvalidArgumentError(
                             "scope_boundary: min exceeds max");
          },
          [](const SpeedLimit& s) {
            return s.v_max >= 0.0 ? absl::OkStatus()
                                  : absl::InvalidArgumentError(
                                        "speed_limit: v_max must be >= 0");
          },
      },
      spec.geometry);
}

double EvaluatePenalty(const ConstraintSpec& spec, const Matrix& trajectories,
                       double time_scale) {
  double acc = 0.0;
  for (std::size_t i = 0; i < trajectories.rows(); ++i) {
    acc += RowPenalty(spec, trajectories.row(i), time_scale, 0.0, {});
  }
  return acc;
}

void AccumulatePenaltyGradient(const ConstraintSpec& spec,
                               const Matrix& trajectories, double time_scale,
                               double weight, Matrix& grad) {
  const auto m = static_cast<std::ptrdiff_t>(trajectories.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    RowPenalty(spec, trajectories.row(i), time_scale, weight, grad.row(i));
  }
}

bool InsideForbiddenRegion(const ConstraintSpec& spec, double x, double y,
                           double t) {
  if (!InWindow(spec, t)) return false;
  if (const auto* disc = std::get_if<ForbiddenDisc>(&spec.geometry)) {
    const double dx = x - disc->center_x, dy = y - disc->center_y;
    return dx * dx + dy * dy < disc->radius * disc->radius;
  }
  if (const auto* box = std::get_if<ForbiddenBox>(&spec.geometry)) {
    return x > box->x_min && x < box->x_max && y > box->y_min &&
           y < box->y_max;
  }
  return false;
}

}  // namespace dpe
