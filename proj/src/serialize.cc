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

#include "dpe/serialize.h"

#include <fstream>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpe {
namespace {

// Runs `f`, turning JSON type and key errors into InvalidArgument.
template <class F>
auto Guard(const char* what, F f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat(what, ": ", e.what()));
  }
}

std::optional<std::uint64_t> OptionalSeed(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::uint64_t>();
}

}  // namespace

Json ToJson(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

absl::StatusOr<Matrix> MatrixFromJson(const Json& j) {
  return Guard("matrix", [&]() -> absl::StatusOr<Matrix> {
    if (!j.is_array()) return absl::InvalidArgumentError("matrix: not a list");
    const std::size_t rows = j.size();
    const std::size_t cols = rows > 0 ? j.at(0).size() : 0;
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      const auto row = j.at(i).get<std::vector<double>>();
      if (row.size() != cols) {
        return absl::InvalidArgumentError(
            absl::StrCat("matrix: row ", i, " has ", row.size(),
                         " entries, expected ", cols));
      }
      std::copy(row.begin(), row.end(), m.row(i).begin());
    }
    return m;
  });
}

Json ToJson(const DistanceSums& s) {
  return {{"metric", s.metric_name}, {"sums", s.sums}};
}

absl::StatusOr<DistanceSums> DistanceSumsFromJson(const Json& j) {
  return Guard("distance sums", [&]() -> absl::StatusOr<DistanceSums> {
    return DistanceSums{j.at("sums").get<std::vector<double>>(),
                        j.at("metric").get<std::string>()};
  });
}

Json ToJson(const PerturbedSums& s) {
  Json j{{"metric", s.original_metric},
         {"epsilon", s.params.epsilon},
         {"lambda", s.params.lambda},
         {"scale", s.params.scale()},
         {"seed", nullptr},
         {"sums", s.sums}};
  if (s.params.seed) j["seed"] = *s.params.seed;
  return j;
}

absl::StatusOr<PerturbedSums> PerturbedSumsFromJson(const Json& j) {
  return Guard("perturbed sums", [&]() -> absl::StatusOr<PerturbedSums> {
    PerturbedSums s;
    s.sums = j.at("sums").get<std::vector<double>>();
    s.params.epsilon = j.at("epsilon").get<double>();
    s.params.lambda = j.at("lambda").get<double>();
    s.params.seed = OptionalSeed(j, "seed");
    s.original_metric = j.at("metric").get<std::string>();
    return s;
  });
}

Json ToJson(const EmbeddedDataset& e) {
  return {{"d_prime", e.d_prime},         {"seed", e.seed},
          {"iterations", e.iterations},   {"loss_trace", e.loss_trace},
          {"points", ToJson(e.points)}};
}

absl::StatusOr<EmbeddedDataset> EmbeddedDatasetFromJson(const Json& j) {
  return Guard("embedding", [&]() -> absl::StatusOr<EmbeddedDataset> {
    EmbeddedDataset e;
    e.d_prime = j.at("d_prime").get<std::size_t>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.iterations = j.at("iterations").get<int>();
    e.loss_trace = j.at("loss_trace").get<std::vector<double>>();
    auto points = MatrixFromJson(j.at("points"));
    if (!points.ok()) return points.status();
    e.points = std::move(*points);
    if (e.points.cols() != e.d_prime) {
      return absl::InvalidArgumentError("embedding: d_prime disagrees with points");
    }
    return e;
  });
}

Json ToJson(const TransformFn& t) {
  return {{"input_dim", t.input_dim()},
          {"output_dim", t.output_dim()},
          {"fit_residual", t.fit_residual},
          {"underdetermined", t.underdetermined},
          {"bias", t.bias},
          {"weights", ToJson(t.weights)}};
}

absl::StatusOr<TransformFn> TransformFromJson(const Json& j) {
  return Guard("transform", [&]() -> absl::StatusOr<TransformFn> {
    TransformFn t;
    auto w = MatrixFromJson(j.at("weights"));
    if (!w.ok()) return w.status();
    t.weights = std::move(*w);
    t.bias = j.at("bias").get<std::vector<double>>();
    t.fit_residual = j.at("fit_residual").get<double>();
    t.underdetermined = j.at("underdetermined").get<bool>();
    if (t.bias.size() != t.output_dim()) {
      return absl::InvalidArgumentError("transform: bias length mismatch");
    }
    return t;
  });
}

Json ToJson(const ConstraintSpec& c) {
  Json j{{"kind", c.kind()}, {"mu", c.mu}};
  std::visit(
      [&](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, ForbiddenDisc>) {
          j["center"] = {g.center_x, g.center_y};
          j["radius"] = g.radius;
        } else if constexpr (std::is_same_v<G, SpeedLimit>) {
          j["v_max"] = g.v_max;
        } else {
          j["x_min"] = g.x_min;
          j["x_max"] = g.x_max;
          j["y_min"] = g.y_min;
          j["y_max"] = g.y_max;
        }
      },
      c.geometry);
  if (c.time_window) {
    j["time_window"] = {c.time_window->begin, c.time_window->end};
  }
  return j;
}

absl::StatusOr<ConstraintSpec> ConstraintFromJson(const Json& j) {
  return Guard("constraint", [&]() -> absl::StatusOr<ConstraintSpec> {
    ConstraintSpec c;
    const std::string kind = j.at("kind").get<std::string>();
    c.mu = j.value("mu", 1.0);
    auto box = [&](auto b) {
      b.x_min = j.at("x_min").get<double>();
      b.x_max = j.at("x_max").get<double>();
      b.y_min = j.at("y_min").get<double>();
      b.y_max = j.at("y_max").get<double>();
      return b;
    };
    if (kind == "forbidden_disc") {
      const auto center = j.at("center").get<std::vector<double>>();
      if (center.size() != 2) {
        return absl::InvalidArgumentError("forbidden_disc: center needs 2 values");
      }
      c.geometry = ForbiddenDisc{center[0], center[1],
                                 j.at("radius").get<double>()};
    } else if (kind == "forbidden_box") {
      c.geometry = box(ForbiddenBox{});
    } else if (kind == "scope_boundary") {
      c.geometry = box(ScopeBoundary{});
    } else if (kind == "speed_limit") {
      c.geometry = SpeedLimit{j.at("v_max").get<double>()};
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown constraint kind '", kind, "'"));
    }
    if (j.contains("time_window") && !j.at("time_window").is_null()) {
      const auto w = j.at("time_window").get<std::vector<double>>();
      if (w.size() != 2) {
        return absl::InvalidArgumentError("time_window needs [begin, end]");
      }
      c.time_window = TimeWindow{w[0], w[1]};
    }
    if (auto s = ValidateConstraint(c); !s.ok()) return s;
    return c;
  });
}

absl::StatusOr<std::vector<ConstraintSpec>> ConstraintsFromJson(const Json& j) {
  const Json& list =
      j.is_object() && j.contains("constraints") ? j.at("constraints") : j;
  if (!list.is_array()) {
    return absl::InvalidArgumentError("constraints: expected a list");
  }
  std::vector<ConstraintSpec> out;
  for (const auto& item : list) {
    auto c = ConstraintFromJson(item);
    if (!c.ok()) return c.status();
    out.push_back(std::move(*c));
  }
  return out;
}

Json ToJson(const Projection& p) {
  return {{"format", CoordinateFormatName(p.format)},
          {"lat0_deg", p.lat0_deg},
          {"lon0_deg", p.lon0_deg},
          {"t_offset", p.t_offset}};
}

absl::StatusOr<Projection> ProjectionFromJson(const Json& j) {
  return Guard("projection", [&]() -> absl::StatusOr<Projection> {
    auto format = ParseCoordinateFormat(j.at("format").get<std::string>());
    if (!format.ok()) return format.status();
    return Projection{*format, j.at("lat0_deg").get<double>(),
                      j.at("lon0_deg").get<double>(),
                      j.at("t_offset").get<double>()};
  });
}

Json ToJson(const Scope& s) {
  return {{"x_min", s.x_min}, {"x_max", s.x_max}, {"y_min", s.y_min},
          {"y_max", s.y_max}, {"t_min", s.t_min}, {"t_max", s.t_max},
          {"r", s.r},         {"tau", s.tau}};
}

absl::StatusOr<Scope> ScopeFromJson(const Json& j) {
  return Guard("scope", [&]() -> absl::StatusOr<Scope> {
    return Scope{j.at("x_min").get<double>(), j.at("x_max").get<double>(),
                 j.at("y_min").get<double>(), j.at("y_max").get<double>(),
                 j.at("t_min").get<double>(), j.at("t_max").get<double>(),
                 j.at("r").get<double>(),     j.at("tau").get<double>()};
  });
}

Json ToJson(const Sensitivity& s) {
  return {{"lambda", s.lambda}, {"r", s.r}, {"tau", s.tau}, {"n", s.n}};
}

absl::StatusOr<Sensitivity> SensitivityFromJson(const Json& j) {
  return Guard("sensitivity", [&]() -> absl::StatusOr<Sensitivity> {
    return Sensitivity{j.at("lambda").get<double>(), j.at("r").get<double>(),
                       j.at("tau").get<double>(), j.at("n").get<std::size_t>()};
  });
}

Json ToJson(const UtilityReport& r) {
  return {{"length_density_error", r.length_density_error},
          {"trajectory_density_error", r.trajectory_density_error},
          {"trip_error", r.trip_error},
          {"mse_trajectories", r.mse_trajectories},
          {"mse_heatmap", r.mse_heatmap}};
}

absl::StatusOr<std::string> ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

absl::Status WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot write '", path, "'"));
  }
  out << text;
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<Json> ReadJsonFile(const std::string& path) {
  auto text = ReadTextFile(path);
  if (!text.ok()) return text.status();
  Json j = Json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat("'", path, "' is not JSON"));
  }
  return j;
}

absl::Status WriteJsonFile(const std::string& path, const Json& j) {
  return WriteTextFile(path, j.dump(2) + "\n");
}

}  // namespace dpe
