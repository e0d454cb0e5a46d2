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

#include "dpe/pipeline.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace dpe {
namespace {

// Prefixes `status` with the stage name, keeping its code.
absl::Status InStage(const char* stage, const absl::Status& status) {
  return absl::Status(status.code(),
                      absl::StrCat(stage, ": ", status.message()));
}

class Stopwatch {
 public:
  double Lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ =
      std::chrono::steady_clock::now();
};

std::uint64_t OsSeed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

const char* InitName(EmbeddingInit init) {
  return init == EmbeddingInit::kRandomUniformInScope ? "random"
                                                      : "identity_if_square";
}

absl::StatusOr<EmbeddingInit> ParseInit(const std::string& s) {
  if (s == "random") return EmbeddingInit::kRandomUniformInScope;
  if (s == "identity_if_square") {
    return EmbeddingInit::kIdentityWhenDimensionsMatch;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown init '", s, "' (expected random or identity_if_square)"));
}

double ResolveFitScale(FitScaleMode mode, double scope_lambda) {
  return mode == FitScaleMode::kSensitivity && scope_lambda > 0.0
             ? scope_lambda
             : 1.0;
}

absl::Status WriteArtifact(const std::string& dir, const std::string& name,
                           const Json& j) {
  return WriteJsonFile((std::filesystem::path(dir) / name).string(), j);
}

absl::Status WriteArtifactText(const std::string& dir, const std::string& name,
                               const std::string& text) {
  return WriteTextFile((std::filesystem::path(dir) / name).string(), text);
}


}  // namespace

absl::StatusOr<FitScaleMode> ParseFitScaleMode(const std::string& s) {
  if (s == "unit") return FitScaleMode::kUnit;
  if (s == "sensitivity") return FitScaleMode::kSensitivity;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown fit scale '", s, "' (expected unit or sensitivity)"));
}

const char* FitScaleModeName(FitScaleMode mode) {
  return mode == FitScaleMode::kUnit ? "unit" : "sensitivity";
}

absl::Status ValidatePipelineConfig(const PipelineConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be > 0, got %g", cfg.epsilon));
  }
  if (!(cfg.time_scale > 0.0) || !std::isfinite(cfg.time_scale)) {
    return absl::InvalidArgumentError("time_scale must be > 0");
  }
  for (const auto& [name, lr, iters] :
       {std::tuple{"embedding", cfg.embedding.learning_rate,
                   cfg.embedding.max_iters},
        std::tuple{"synthesis", cfg.synthesis.learning_rate,
                   cfg.synthesis.max_iters}}) {
    if (!(lr > 0.0) || !std::isfinite(lr)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("%s learning rate must be > 0", name));
    }
    if (iters < 0) {
      return absl::InvalidArgumentError(
          absl::StrFormat("%s max_iters must be >= 0", name));
    }
  }
  if (!(cfg.cell_size > 0.0)) {
    return absl::InvalidArgumentError("cell_size must be > 0");
  }
  for (const auto& c : cfg.synthesis.constraints) {
    if (auto s = ValidateConstraint(c); !s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::StatusOr<PipelineConfig> PipelineConfigFromJson(const Json& j,
                                                      PipelineConfig cfg) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError("config: expected an object");
  }
  try {
    if (j.contains("input")) cfg.input_path = j.at("input").get<std::string>();
    if (j.contains("format")) {
      auto f = ParseCoordinateFormat(j.at("format").get<std::string>());
      if (!f.ok()) return f.status();
      cfg.format = *f;
    }
    if (j.contains("output_dir")) {
      cfg.output_dir = j.at("output_dir").get<std::string>();
    }
    cfg.d_prime = j.value("d_prime", cfg.d_prime);
    cfg.time_scale = j.value("time_scale", cfg.time_scale);
    cfg.epsilon = j.value("epsilon", cfg.epsilon);
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.zero_noise = j.value("zero_noise", cfg.zero_noise);
    cfg.evaluate = j.value("evaluate", cfg.evaluate);
    cfg.cell_size = j.value("cell_size", cfg.cell_size);
    if (j.contains("fit_scale")) {
      auto mode = ParseFitScaleMode(j.at("fit_scale").get<std::string>());
      if (!mode.ok()) return mode.status();
      cfg.fit_scale_mode = *mode;
    }
    if (j.contains("embedding")) {
      const Json& e = j.at("embedding");
      cfg.embedding.learning_rate = e.value("lr", cfg.embedding.learning_rate);
      cfg.embedding.max_iters = e.value("max_iters", cfg.embedding.max_iters);
      cfg.embedding.tolerance = e.value("tol", cfg.embedding.tolerance);
      if (e.contains("init")) {
        auto init = ParseInit(e.at("init").get<std::string>());
        if (!init.ok()) return init.status();
        cfg.embedding.init = *init;
      }
    }
    if (j.contains("synthesis")) {
      const Json& s = j.at("synthesis");
      cfg.synthesis.learning_rate = s.value("lr", cfg.synthesis.learning_rate);
      cfg.synthesis.max_iters = s.value("max_iters", cfg.synthesis.max_iters);
      cfg.synthesis.tolerance = s.value("tol", cfg.synthesis.tolerance);
    }
    if (j.contains("constraints")) {
      const Json& c = j.at("constraints");
      absl::StatusOr<std::vector<ConstraintSpec>> list =
          c.is_string() ? [&]() -> absl::StatusOr<std::vector<ConstraintSpec>> {
            auto file = ReadJsonFile(c.get<std::string>());
            if (!file.ok()) return file.status();
            return ConstraintsFromJson(*file);
          }()
                        : ConstraintsFromJson(c);
      if (!list.ok()) return list.status();
      cfg.synthesis.constraints = std::move(*list);
    }
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("config: ", e.what()));
  }
  return cfg;
}

Json ToJson(const PipelineConfig& cfg) {
  Json constraints = Json::array();
  for (const auto& c : cfg.synthesis.constraints) {
    constraints.push_back(ToJson(c));
  }
  Json j{{"format", CoordinateFormatName(cfg.format)},
         {"d_prime", cfg.d_prime},
         {"time_scale", cfg.time_scale},
         {"epsilon", cfg.epsilon},
         {"seed", nullptr},
         {"zero_noise", cfg.zero_noise},
         {"fit_scale", FitScaleModeName(cfg.fit_scale_mode)},
         {"cell_size", cfg.cell_size},
         {"embedding",
          {{"lr", cfg.embedding.learning_rate},
           {"max_iters", cfg.embedding.max_iters},
           {"tol", cfg.embedding.tolerance},
           {"init", InitName(cfg.embedding.init)}}},
         {"synthesis",
          {{"lr", cfg.synthesis.learning_rate},
           {"max_iters", cfg.synthesis.max_iters},
           {"tol", cfg.synthesis.tolerance}}},
         {"constraints", constraints}};
  if (cfg.seed) j["seed"] = *cfg.seed;
  return j;
}

absl::StatusOr<PreparedDataset> Prepare(const std::vector<RawTrajectory>& raw,
                                        CoordinateFormat format,
                                        double time_scale) {
  PreparedDataset out;
  out.time_scale = time_scale;
  auto projected = Project(raw, format);
  if (!projected.ok()) return InStage("project", projected.status());
  out.projected = std::move(*projected);
  auto aligned = Align(out.projected.trajectories);
  if (!aligned.ok()) return InStage("align", aligned.status());
  out.aligned = std::move(*aligned);
  auto flat = Flatten(out.aligned, time_scale);
  if (!flat.ok()) return InStage("flatten", flat.status());
  out.flat = std::move(*flat);
  auto sensitivity =
      GlobalSensitivity(out.aligned.scope, out.aligned.n, time_scale);
  if (!sensitivity.ok()) return InStage("sensitivity", sensitivity.status());
  out.sensitivity = *sensitivity;
  return out;
}

absl::StatusOr<PreparedDataset> PrepareFromFile(const std::string& path,
                                                CoordinateFormat format,
                                                double time_scale) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("ingest: cannot open input '", path, "'"));
  }
  auto parsed = ParseDataset(in, format);
  if (!parsed.ok()) {
    return InStage("ingest", absl::Status(parsed.status().code(),
                                          absl::StrCat(path, ": ",
                                                       parsed.status().message())));
  }
  if (parsed->trajectories.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("ingest: ", path, ": every trajectory was rejected"));
  }
  return Prepare(parsed->trajectories, format, time_scale);
}

absl::StatusOr<PreparedDataset> PrepareFromTrajectories(
    const std::vector<Trajectory>& trajectories, double time_scale) {
  std::vector<RawTrajectory> raw;
  raw.reserve(trajectories.size());
  for (const auto& t : trajectories) {
    RawTrajectory r{t.id, {}};
    r.points.reserve(t.points.size());
    for (const auto& p : t.points) r.points.push_back({p.x, p.y, p.t});
    raw.push_back(std::move(r));
  }
  return Prepare(raw, CoordinateFormat::kCsvXy, time_scale);
}

Json DatasetMetaJson(const PreparedDataset& data) {
  Json ids = Json::array();
  for (const auto& t : data.aligned.trajectories) ids.push_back(t.id);
  return {{"m", data.aligned.trajectories.size()},
          {"n", data.aligned.n},
          {"time_scale", data.time_scale},
          {"projection", ToJson(data.projected.projection)},
          {"scope", ToJson(data.aligned.scope)},
          {"sensitivity", ToJson(data.sensitivity)},
          {"ids", ids}};
}

absl::StatusOr<EmbedStage> RunEmbedStage(const PreparedDataset& data,
                                         std::size_t d_prime,
                                         const OptimizerConfig& cfg) {
  EmbedStage out;
  const std::size_t dim = d_prime == 0 ? data.flat.cols() : d_prime;
  auto embedded = Embed(data.flat, dim, cfg);
  if (!embedded.ok()) return InStage("embed", embedded.status());
  out.embedding = std::move(*embedded);
  auto transform = FitTransform(out.embedding.points, data.flat);
  if (!transform.ok()) return InStage("fit_transform", transform.status());
  out.transform = std::move(*transform);
  auto sums = AllDistanceSums(data.flat);
  if (!sums.ok()) return InStage("distance_sums", sums.status());
  out.sums = std::move(*sums);
  return out;
}

absl::StatusOr<PerturbedSums> RunPerturbStage(const DistanceSums& sums,
                                              const Sensitivity& sensitivity,
                                              double epsilon,
                                              std::uint64_t seed,
                                              bool zero_noise) {
  PrivacyParams params{epsilon, zero_noise ? 0.0 : sensitivity.lambda, seed};
  auto perturbed = PerturbSums(sums, params);
  if (!perturbed.ok()) return InStage("perturb", perturbed.status());
  return perturbed;
}

absl::StatusOr<SynthesisResult> RunSynthesisStage(
    const EmbeddedDataset& embedding, const PerturbedSums& perturbed,
    const TransformFn& transform, SynthesisConfig cfg, FitScaleMode mode,
    double scope_lambda, double time_scale) {
  cfg.fit_scale = ResolveFitScale(mode, scope_lambda);
  cfg.time_scale = time_scale;
  auto result = Synthesize(embedding, perturbed, transform, cfg);
  if (!result.ok()) return InStage("synthesize", result.status());
  for (std::size_t i = 0; i < result->dataset.size(); ++i) {
    result->dataset[i].id = absl::StrCat("syn_", i);
  }
  return result;
}

Json SynthesisJson(const SynthesisResult& result, double fit_scale) {
  Json penalties = Json::array();
  for (const auto& p : result.penalties) {
    penalties.push_back(
        {{"kind", p.kind}, {"mu", p.mu}, {"penalty", p.penalty}});
  }
  return {{"fit_scale", fit_scale},
          {"iterations", result.iterations},
          {"final_loss", result.final_loss},
          {"total_penalty", result.total_penalty},
          {"penalties", penalties},
          {"residuals", result.residuals},
          {"loss_trace", result.loss_trace}};
}

std::string SyntheticCsv(const SynthesisResult& result,
                         const Projection& projection) {
  std::ostringstream out;
  WriteDatasetCsv(out, result.dataset, projection);
  return out.str();
}

absl::StatusOr<UtilityReport> EvaluateCsv(const PreparedDataset& original,
                                          const std::string& synthetic_csv,
                                          double cell_size) {
  std::istringstream in(synthetic_csv);
  auto parsed = ParseDataset(in, original.projected.projection.format,
                             /*reject_decreasing_time=*/false);
  if (!parsed.ok()) return InStage("evaluate", parsed.status());
  const auto synthetic =
      ProjectWith(parsed->trajectories, original.projected.projection);
  auto report = EvaluateUtility(original.aligned.trajectories, synthetic,
                                cell_size);
  if (!report.ok()) return InStage("evaluate", report.status());
  return report;
}

absl::StatusOr<PipelineReport> RunPipeline(const PipelineConfig& cfg) {
  if (auto s = ValidatePipelineConfig(cfg); !s.ok()) return s;
  Stopwatch clock;
  auto data = PrepareFromFile(cfg.input_path, cfg.format, cfg.time_scale);
  if (!data.ok()) return data.status();
  const double ingest_seconds = clock.Lap();
  auto report = RunPipeline(cfg, *data);
  if (!report.ok()) return report.status();
  report->timings["ingest"] = ingest_seconds;
  if (!cfg.output_dir.empty()) {
    if (auto s = WriteArtifact(cfg.output_dir, "timings.json", report->timings);
        !s.ok()) {
      return InStage("export", s);
    }
  }
  return report;
}

absl::StatusOr<PipelineReport> RunPipeline(const PipelineConfig& cfg_in,
                                           const PreparedDataset& data) {
  if (auto s = ValidatePipelineConfig(cfg_in); !s.ok()) return s;
  PipelineConfig cfg = cfg_in;
  if (!cfg.seed) cfg.seed = OsSeed();
  if (!cfg.embedding.seed) {
    cfg.embedding.seed = DeriveSeed(*cfg.seed, kEmbeddingStream);
  }
  const bool persist = !cfg.output_dir.empty();
  if (persist) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) {
      return absl::PermissionDeniedError(absl::StrCat(
          "export: cannot create '", cfg.output_dir, "': ", ec.message()));
    }
  }
  auto persist_json = [&](const char* name, const Json& j) -> absl::Status {
    if (!persist) return absl::OkStatus();
    if (auto s = WriteArtifact(cfg.output_dir, name, j); !s.ok()) {
      return InStage("export", s);
    }
    return absl::OkStatus();
  };
  auto persist_text = [&](const char* name,
                          const std::string& text) -> absl::Status {
    if (!persist) return absl::OkStatus();
    if (auto s = WriteArtifactText(cfg.output_dir, name, text); !s.ok()) {
      return InStage("export", s);
    }
    return absl::OkStatus();
  };

  PipelineReport out;
  Stopwatch clock;
  if (auto s = persist_json("dataset.json", DatasetMetaJson(data)); !s.ok()) {
    return s;
  }

  auto embed = RunEmbedStage(data, cfg.d_prime, cfg.embedding);
  if (!embed.ok()) return embed.status();
  out.timings["embed"] = clock.Lap();
  for (const auto& [name, j] :
       {std::pair{"distance_sums.json", ToJson(embed->sums)},
        std::pair{"embedding.json", ToJson(embed->embedding)},
        std::pair{"transform.json", ToJson(embed->transform)}}) {
    if (auto s = persist_json(name, j); !s.ok()) return s;
  }

  auto perturbed =
      RunPerturbStage(embed->sums, data.sensitivity, cfg.epsilon,
                      DeriveSeed(*cfg.seed, kNoiseStream), cfg.zero_noise);
  if (!perturbed.ok()) return perturbed.status();
  out.timings["perturb"] = clock.Lap();
  if (auto s = persist_json("perturbed_sums.json", ToJson(*perturbed));
      !s.ok()) {
    return s;
  }

  auto synthesis = RunSynthesisStage(
      embed->embedding, *perturbed, embed->transform, cfg.synthesis,
      cfg.fit_scale_mode, data.sensitivity.lambda, data.time_scale);
  if (!synthesis.ok()) return synthesis.status();
  out.timings["synthesize"] = clock.Lap();
  const double fit_scale =
      ResolveFitScale(cfg.fit_scale_mode, data.sensitivity.lambda);
  out.synthetic_csv = SyntheticCsv(*synthesis, data.projected.projection);
  if (auto s = persist_json("synthesis.json", SynthesisJson(*synthesis, fit_scale));
      !s.ok()) {
    return s;
  }
  if (auto s = persist_text("synthetic.csv", out.synthetic_csv); !s.ok()) {
    return s;
  }

  Json metrics_json = nullptr;
  if (cfg.evaluate) {
    auto metrics = EvaluateCsv(data, out.synthetic_csv, cfg.cell_size);
    if (!metrics.ok()) return metrics.status();
    out.metrics = *metrics;
    metrics_json = ToJson(out.metrics);
    metrics_json["epsilon"] = cfg.epsilon;
    metrics_json["seed"] = *perturbed->params.seed;
    metrics_json["jsd_base"] = 2;
    metrics_json["cell_size"] = cfg.cell_size;
    metrics_json["heatmap_normalization"] = "probability_per_cell";
    if (auto s = persist_json("metrics.json", metrics_json); !s.ok()) return s;
    if (persist) {
      std::vector<double> lo, ls;
      double max_len = 0.0;
      for (const auto& t : data.aligned.trajectories) {
        lo.push_back(TrajectoryLength(t));
        max_len = std::max(max_len, lo.back());
      }
      for (const auto& t : synthesis->dataset) {
        ls.push_back(TrajectoryLength(t));
        max_len = std::max(max_len, ls.back());
      }
      std::ostringstream ho, hs, mo, ms;
      WriteHistogramCsv(ho, MakeHistogram(lo, 0.0, max_len, kLengthBins));
      WriteHistogramCsv(hs, MakeHistogram(ls, 0.0, max_len, kLengthBins));
      auto grid = SharedGrid(data.aligned.trajectories, synthesis->dataset,
                             cfg.cell_size);
      if (!grid.ok()) return InStage("evaluate", grid.status());
      WriteHeatmapCsv(mo, CountPoints(*grid, data.aligned.trajectories));
      WriteHeatmapCsv(ms, CountPoints(*grid, synthesis->dataset));
      for (const auto& [name, text] :
           {std::pair{"length_histogram_original.csv", ho.str()},
            std::pair{"length_histogram_synthetic.csv", hs.str()},
            std::pair{"heatmap_original.csv", mo.str()},
            std::pair{"heatmap_synthetic.csv", ms.str()}}) {
        if (auto s = persist_text(name, text); !s.ok()) return s;
      }
    }
    out.timings["evaluate"] = clock.Lap();
  }

  out.report = {
      {"config", ToJson(cfg)},
      {"dataset",
       {{"m", data.aligned.trajectories.size()},
        {"n", data.aligned.n},
        {"scope", ToJson(data.aligned.scope)},
        {"sensitivity", ToJson(data.sensitivity)}}},
      {"embedding",
       {{"d_prime", embed->embedding.d_prime},
        {"seed", embed->embedding.seed},
        {"iterations", embed->embedding.iterations},
        {"initial_loss", embed->embedding.loss_trace.empty()
                             ? 0.0
                             : embed->embedding.loss_trace.front()},
        {"final_loss", embed->embedding.loss_trace.empty()
                           ? 0.0
                           : *std::min_element(
                                 embed->embedding.loss_trace.begin(),
                                 embed->embedding.loss_trace.end())},
        {"loss_trace", embed->embedding.loss_trace},
        {"transform_fit_residual", embed->transform.fit_residual},
        {"transform_underdetermined", embed->transform.underdetermined}}},
      {"perturbation",
       {{"epsilon", perturbed->params.epsilon},
        {"lambda", perturbed->params.lambda},
        {"scale", perturbed->params.scale()},
        {"seed", *perturbed->params.seed}}},
      {"synthesis",
       {{"fit_scale", fit_scale},
        {"iterations", synthesis->iterations},
        {"final_loss", synthesis->final_loss},
        {"total_penalty", synthesis->total_penalty},
        {"loss_trace", synthesis->loss_trace}}},
      {"metrics", metrics_json}};
  out.synthesis = std::move(*synthesis);
  if (auto s = persist_json("report.json", out.report); !s.ok()) return s;
  if (auto s = persist_json("timings.json", out.timings); !s.ok()) return s;
  return out;
}

absl::StatusOr<std::vector<SweepRow>> RunSweep(const SweepConfig& cfg) {
  if (cfg.d_primes.empty()) {
    return absl::InvalidArgumentError("sweep: d_prime list is empty");
  }
  if (cfg.epsilons.empty()) {
    return absl::InvalidArgumentError("sweep: epsilon list is empty");
  }
  if (cfg.seeds.empty()) {
    return absl::InvalidArgumentError("sweep: seed list is empty");
  }
  for (double eps : cfg.epsilons) {
    if (!(eps > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("sweep: epsilon must be > 0, got %g", eps));
    }
  }
  auto sim = Simulate(cfg.sim);
  if (!sim.ok()) return InStage("simulate", sim.status());
  auto data = PrepareFromTrajectories(*sim, cfg.time_scale);
  if (!data.ok()) return data.status();

  std::vector<SweepRow> rows;
  for (std::size_t d_prime : cfg.d_primes) {
    for (std::uint64_t seed : cfg.seeds) {
      OptimizerConfig embed_cfg = cfg.embedding;
      embed_cfg.seed = DeriveSeed(seed, kEmbeddingStream);
      auto embed = RunEmbedStage(*data, d_prime, embed_cfg);
      if (!embed.ok()) return embed.status();
      for (double eps : cfg.epsilons) {
        auto perturbed =
            RunPerturbStage(embed->sums, data->sensitivity, eps,
                            DeriveSeed(seed, kNoiseStream), /*zero_noise=*/false);
        if (!perturbed.ok()) return perturbed.status();
        auto synthesis = RunSynthesisStage(
            embed->embedding, *perturbed, embed->transform, cfg.synthesis,
            cfg.fit_scale_mode, data->sensitivity.lambda, data->time_scale);
        if (!synthesis.ok()) return synthesis.status();
        auto metrics = EvaluateUtility(data->aligned.trajectories,
                                       synthesis->dataset, cfg.cell_size);
        if (!metrics.ok()) return InStage("evaluate", metrics.status());
        rows.push_back({embed->embedding.d_prime, eps, seed, *metrics});
      }
    }
  }
  return rows;
}

std::vector<SweepRow> AverageOverSeeds(const std::vector<SweepRow>& rows) {
  std::map<std::pair<std::size_t, double>, std::pair<UtilityReport, int>> acc;
  for (const auto& r : rows) {
    auto& [sum, count] = acc[{r.d_prime, r.epsilon}];
    sum.length_density_error += r.metrics.length_density_error;
    sum.trajectory_density_error += r.metrics.trajectory_density_error;
    sum.trip_error += r.metrics.trip_error;
    sum.mse_trajectories += r.metrics.mse_trajectories;
    sum.mse_heatmap += r.metrics.mse_heatmap;
    ++count;
  }
  std::vector<SweepRow> out;
  for (auto& [key, v] : acc) {
    auto& [sum, count] = v;
    sum.length_density_error /= count;
    sum.trajectory_density_error /= count;
    sum.trip_error /= count;
    sum.mse_trajectories /= count;
    sum.mse_heatmap /= count;
    out.push_back({key.first, key.second, static_cast<std::uint64_t>(count),
                   sum});
  }
  return out;
}

std::string SweepCsv(const std::vector<SweepRow>& rows) {
  std::string out =
      "d_prime,epsilon,seed,mse_trajectories,mse_heatmap,"
      "length_density_error,trajectory_density_error,trip_error\n";
  for (const auto& r : rows) {
    absl::StrAppendFormat(&out, "%d,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          r.d_prime, r.epsilon, r.seed,
                          r.metrics.mse_trajectories, r.metrics.mse_heatmap,
                          r.metrics.length_density_error,
                          r.metrics.trajectory_density_error,
                          r.metrics.trip_error);
  }
  return out;
}

ViolationCounts CountViolations(const std::vector<Trajectory>& synthetic,
                                const std::vector<ConstraintSpec>& constraints,
                                const ScopeBoundary& box, double tolerance) {
  ViolationCounts v;
  v.inside_region.assign(constraints.size(), 0);
  for (const auto& t : synthetic) {
    for (const auto& p : t.points) {
      ++v.points;
      for (std::size_t k = 0; k < constraints.size(); ++k) {
        if (InsideForbiddenRegion(constraints[k], p.x, p.y, p.t)) {
          ++v.inside_region[k];
        }
      }
      const double out_x = std::max({box.x_min - p.x, p.x - box.x_max, 0.0});
      const double out_y = std::max({box.y_min - p.y, p.y - box.y_max, 0.0});
      const double out = std::max(out_x, out_y);
      v.max_outside = std::max(v.max_outside, out);
      if (out > tolerance) ++v.outside_scope;
    }
  }
  return v;
}

absl::StatusOr<ConstraintsReport> RunConstraintsExperiment(
    const ConstraintsExperimentConfig& cfg) {
  auto sim = Simulate(cfg.sim);
  if (!sim.ok()) return InStage("simulate", sim.status());
  auto data = PrepareFromTrajectories(*sim, cfg.time_scale);
  if (!data.ok()) return data.status();
  OptimizerConfig embed_cfg = cfg.embedding;
  embed_cfg.seed = DeriveSeed(cfg.seed, kEmbeddingStream);
  auto embed = RunEmbedStage(*data, cfg.d_prime, embed_cfg);
  if (!embed.ok()) return embed.status();
  auto perturbed =
      RunPerturbStage(embed->sums, data->sensitivity, cfg.epsilon,
                      DeriveSeed(cfg.seed, kNoiseStream), /*zero_noise=*/false);
  if (!perturbed.ok()) return perturbed.status();

  const ScopeBoundary box{cfg.sim.x_min, cfg.sim.x_max, cfg.sim.y_min,
                          cfg.sim.y_max};
  ConstraintsReport out;
  Json runs = Json::object();
  for (bool penalized : {true, false}) {
    SynthesisConfig synth = cfg.synthesis;
    synth.constraints = penalized ? cfg.constraints
                                  : std::vector<ConstraintSpec>{};
    auto result = RunSynthesisStage(embed->embedding, *perturbed,
                                    embed->transform, synth, cfg.fit_scale_mode,
                                    data->sensitivity.lambda, data->time_scale);
    if (!result.ok()) return result.status();
    ViolationCounts v =
        CountViolations(result->dataset, cfg.constraints, box,
                        cfg.scope_tolerance);
    Json inside = Json::array();
    for (std::size_t k = 0; k < cfg.constraints.size(); ++k) {
      inside.push_back({{"kind", cfg.constraints[k].kind()},
                        {"points_inside", v.inside_region[k]},
                        {"fraction_inside", v.InsideFraction(k)}});
    }
    runs[penalized ? "penalized" : "unpenalized"] = {
        {"points", v.points},
        {"regions", inside},
        {"outside_scope", v.outside_scope},
        {"max_outside", v.max_outside},
        {"final_loss", result->final_loss},
        {"iterations", result->iterations}};
    (penalized ? out.penalized : out.unpenalized) = std::move(v);
    (penalized ? out.penalized_dataset : out.unpenalized_dataset) =
        std::move(result->dataset);
  }
  Json constraints = Json::array();
  for (const auto& c : cfg.constraints) constraints.push_back(ToJson(c));
  out.report = {{"m", cfg.sim.m},
                {"n", cfg.sim.length},
                {"epsilon", cfg.epsilon},
                {"seed", cfg.seed},
                {"lambda", data->sensitivity.lambda},
                {"synthesis_lr", cfg.synthesis.learning_rate},
                {"fit_scale", FitScaleModeName(cfg.fit_scale_mode)},
                {"scope_tolerance", cfg.scope_tolerance},
                {"constraints", constraints},
                {"runs", runs}};
  return out;
}

}  // namespace dpe
