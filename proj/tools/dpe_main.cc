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

// Command-line front end. Exit codes: 0 success, 1 invalid input or
// configuration, 2 runtime failure (I/O, divergence).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpe/pipeline.h"

namespace {

using dpe::Json;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int ExitCodeFor(const absl::Status& s) {
  switch (s.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kOutOfRange:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

int Report(const absl::Status& s) {
  if (!s.ok()) std::cerr << "error: " << s.message() << "\n";
  return ExitCodeFor(s);
}

std::string PathIn(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

absl::Status EnsureDir(const std::string& dir) {
  if (dir.empty()) return absl::InvalidArgumentError("--output-dir is required");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create '", dir, "': ", ec.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<dpe::ConstraintSpec>> LoadConstraints(
    const std::string& path) {
  if (path.empty()) return std::vector<dpe::ConstraintSpec>{};
  auto j = dpe::ReadJsonFile(path);
  if (!j.ok()) return j.status();
  return dpe::ConstraintsFromJson(*j);
}

// Flags shared by several subcommands.
struct CommonFlags {
  std::string input;
  std::string format = "csv_xy";
  std::string output_dir;
  double epsilon = 1.0;
  std::size_t d_prime = 0;
  double lr = 0.0;  // 0 keeps the stage default
  int max_iters = 500;
  std::uint64_t seed = 0;
  std::string constraints;
  double time_scale = 1.0;
  std::string init = "identity_if_square";
  std::string fit_scale = "unit";
  double cell_size = dpe::kDefaultCellSize;
  bool zero_noise = false;
};

absl::StatusOr<dpe::EmbeddingInit> InitFromFlag(const std::string& s) {
  if (s == "random") return dpe::EmbeddingInit::kRandomUniformInScope;
  if (s == "identity_if_square") {
    return dpe::EmbeddingInit::kIdentityWhenDimensionsMatch;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown --init '", s, "'"));
}

absl::Status RunSimulate(const dpe::SimSpec& spec, const std::string& output) {
  auto data = dpe::Simulate(spec);
  if (!data.ok()) return data.status();
  std::ostringstream csv;
  dpe::WriteDatasetCsv(csv, *data, dpe::Projection{});
  if (output.empty() || output == "-") {
    std::cout << csv.str();
    return absl::OkStatus();
  }
  return dpe::WriteTextFile(output, csv.str());
}

absl::Status RunEmbed(const CommonFlags& f) {
  if (auto s = EnsureDir(f.output_dir); !s.ok()) return s;
  auto format = dpe::ParseCoordinateFormat(f.format);
  if (!format.ok()) return format.status();
  auto init = InitFromFlag(f.init);
  if (!init.ok()) return init.status();
  auto data = dpe::PrepareFromFile(f.input, *format, f.time_scale);
  if (!data.ok()) return data.status();
  dpe::OptimizerConfig cfg;
  if (f.lr > 0.0) cfg.learning_rate = f.lr;
  cfg.max_iters = f.max_iters;
  cfg.init = *init;
  cfg.seed = dpe::DeriveSeed(f.seed, dpe::kEmbeddingStream);
  auto stage = dpe::RunEmbedStage(*data, f.d_prime, cfg);
  if (!stage.ok()) return stage.status();
  for (const auto& [name, j] :
       {std::pair{"dataset.json", dpe::DatasetMetaJson(*data)},
        std::pair{"distance_sums.json", dpe::ToJson(stage->sums)},
        std::pair{"embedding.json", dpe::ToJson(stage->embedding)},
        std::pair{"transform.json", dpe::ToJson(stage->transform)}}) {
    if (auto s = dpe::WriteJsonFile(PathIn(f.output_dir, name), j); !s.ok()) {
      return s;
    }
  }
  if (stage->transform.underdetermined) {
    std::cerr << "warning: fewer trajectories than d_prime + 1; the transform "
                 "is the minimum-norm solution\n";
  }
  return absl::OkStatus();
}

absl::StatusOr<Json> ReadArtifact(const std::string& dir, const char* name) {
  return dpe::ReadJsonFile(PathIn(dir, name));
}

absl::Status RunPerturb(const CommonFlags& f) {
  auto meta = ReadArtifact(f.output_dir, "dataset.json");
  if (!meta.ok()) return meta.status();
  auto sums_json = ReadArtifact(f.output_dir, "distance_sums.json");
  if (!sums_json.ok()) return sums_json.status();
  auto sums = dpe::DistanceSumsFromJson(*sums_json);
  if (!sums.ok()) return sums.status();
  auto sensitivity = dpe::SensitivityFromJson(meta->at("sensitivity"));
  if (!sensitivity.ok()) return sensitivity.status();
  auto perturbed = dpe::RunPerturbStage(
      *sums, *sensitivity, f.epsilon,
      dpe::DeriveSeed(f.seed, dpe::kNoiseStream), f.zero_noise);
  if (!perturbed.ok()) return perturbed.status();
  return dpe::WriteJsonFile(PathIn(f.output_dir, "perturbed_sums.json"),
                            dpe::ToJson(*perturbed));
}

absl::Status RunSynthesize(const CommonFlags& f) {
  auto meta = ReadArtifact(f.output_dir, "dataset.json");
  if (!meta.ok()) return meta.status();
  auto embedding_json = ReadArtifact(f.output_dir, "embedding.json");
  if (!embedding_json.ok()) return embedding_json.status();
  auto transform_json = ReadArtifact(f.output_dir, "transform.json");
  if (!transform_json.ok()) return transform_json.status();
  auto perturbed_json = ReadArtifact(f.output_dir, "perturbed_sums.json");
  if (!perturbed_json.ok()) return perturbed_json.status();

  auto embedding = dpe::EmbeddedDatasetFromJson(*embedding_json);
  if (!embedding.ok()) return embedding.status();
  auto transform = dpe::TransformFromJson(*transform_json);
  if (!transform.ok()) return transform.status();
  auto perturbed = dpe::PerturbedSumsFromJson(*perturbed_json);
  if (!perturbed.ok()) return perturbed.status();
  auto sensitivity = dpe::SensitivityFromJson(meta->at("sensitivity"));
  if (!sensitivity.ok()) return sensitivity.status();
  auto projection = dpe::ProjectionFromJson(meta->at("projection"));
  if (!projection.ok()) return projection.status();
  auto mode = dpe::ParseFitScaleMode(f.fit_scale);
  if (!mode.ok()) return mode.status();
  auto constraints = LoadConstraints(f.constraints);
  if (!constraints.ok()) return constraints.status();

  dpe::SynthesisConfig cfg;
  if (f.lr > 0.0) cfg.learning_rate = f.lr;
  cfg.max_iters = f.max_iters;
  cfg.constraints = std::move(*constraints);
  const double time_scale = meta->at("time_scale").get<double>();
  auto result = dpe::RunSynthesisStage(*embedding, *perturbed, *transform, cfg,
                                       *mode, sensitivity->lambda, time_scale);
  if (!result.ok()) return result.status();
  const double fit_scale =
      *mode == dpe::FitScaleMode::kSensitivity && sensitivity->lambda > 0.0
          ? sensitivity->lambda
          : 1.0;
  if (auto s = dpe::WriteJsonFile(PathIn(f.output_dir, "synthesis.json"),
                                  dpe::SynthesisJson(*result, fit_scale));
      !s.ok()) {
    return s;
  }
  return dpe::WriteTextFile(PathIn(f.output_dir, "synthetic.csv"),
                            dpe::SyntheticCsv(*result, *projection));
}

absl::Status RunEvaluate(const CommonFlags& f, const std::string& synthetic) {
  if (auto s = EnsureDir(f.output_dir); !s.ok()) return s;
  auto format = dpe::ParseCoordinateFormat(f.format);
  if (!format.ok()) return format.status();
  auto data = dpe::PrepareFromFile(f.input, *format, f.time_scale);
  if (!data.ok()) return data.status();
  const std::string path =
      synthetic.empty() ? PathIn(f.output_dir, "synthetic.csv") : synthetic;
  auto csv = dpe::ReadTextFile(path);
  if (!csv.ok()) return csv.status();
  auto metrics = dpe::EvaluateCsv(*data, *csv, f.cell_size);
  if (!metrics.ok()) return metrics.status();
  Json j = dpe::ToJson(*metrics);
  j["epsilon"] = nullptr;
  j["seed"] = nullptr;
  if (auto p = ReadArtifact(f.output_dir, "perturbed_sums.json"); p.ok()) {
    j["epsilon"] = p->at("epsilon");
    j["seed"] = p->at("seed");
  }
  j["jsd_base"] = 2;
  j["cell_size"] = f.cell_size;
  j["heatmap_normalization"] = "probability_per_cell";
  std::cout << j.dump(2) << "\n";
  return dpe::WriteJsonFile(PathIn(f.output_dir, "metrics.json"), j);
}

absl::Status RunPipelineCommand(const CommonFlags& f, const CLI::App& app,
                                const std::string& config_path,
                                int synth_iters, double embed_lr) {
  dpe::PipelineConfig cfg;
  if (!config_path.empty()) {
    auto j = dpe::ReadJsonFile(config_path);
    if (!j.ok()) return j.status();
    auto parsed = dpe::PipelineConfigFromJson(*j);
    if (!parsed.ok()) return parsed.status();
    cfg = std::move(*parsed);
  }
  auto given = [&](const char* flag) { return app.count(flag) > 0; };
  if (given("--input")) cfg.input_path = f.input;
  if (given("--format")) {
    auto format = dpe::ParseCoordinateFormat(f.format);
    if (!format.ok()) return format.status();
    cfg.format = *format;
  }
  if (given("--output-dir")) cfg.output_dir = f.output_dir;
  if (given("--epsilon")) cfg.epsilon = f.epsilon;
  if (given("--d-prime")) cfg.d_prime = f.d_prime;
  if (given("--lr")) cfg.synthesis.learning_rate = f.lr;
  if (given("--embed-lr")) cfg.embedding.learning_rate = embed_lr;
  if (given("--max-iters")) {
    cfg.embedding.max_iters = f.max_iters;
    cfg.synthesis.max_iters = synth_iters > 0 ? synth_iters : f.max_iters;
  }
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--time-scale")) cfg.time_scale = f.time_scale;
  if (given("--zero-noise")) cfg.zero_noise = f.zero_noise;
  if (given("--cell-size")) cfg.cell_size = f.cell_size;
  if (given("--init")) {
    auto init = InitFromFlag(f.init);
    if (!init.ok()) return init.status();
    cfg.embedding.init = *init;
  }
  if (given("--fit-scale")) {
    auto mode = dpe::ParseFitScaleMode(f.fit_scale);
    if (!mode.ok()) return mode.status();
    cfg.fit_scale_mode = *mode;
  }
  if (given("--constraints")) {
    auto constraints = LoadConstraints(f.constraints);
    if (!constraints.ok()) return constraints.status();
    cfg.synthesis.constraints = std::move(*constraints);
  }
  if (cfg.input_path.empty()) {
    return absl::InvalidArgumentError("--input is required");
  }
  if (cfg.output_dir.empty()) {
    return absl::InvalidArgumentError("--output-dir is required");
  }
  auto report = dpe::RunPipeline(cfg);
  if (!report.ok()) return report.status();
  std::cout << report->report.at("metrics").dump(2) << "\n";
  return absl::OkStatus();
}

void AddCommon(CLI::App* cmd, CommonFlags& f, bool input, bool privacy,
               bool optimizer) {
  if (input) {
    cmd->add_option("--input", f.input, "Input CSV");
    cmd->add_option("--format", f.format, "csv_xy or csv_latlon")
        ->check(CLI::IsMember({"csv_xy", "csv_latlon"}));
    cmd->add_option("--time-scale", f.time_scale, "Multiplier on time");
  }
  cmd->add_option("--output-dir", f.output_dir, "Artifact directory");
  if (privacy) {
    cmd->add_option("--epsilon", f.epsilon, "Privacy budget");
    cmd->add_flag("--zero-noise", f.zero_noise, "Force the sensitivity to 0");
  }
  if (optimizer) {
    cmd->add_option("--d-prime", f.d_prime, "Embedding dimension (0 = 3n)");
    cmd->add_option("--lr", f.lr, "Learning rate");
    cmd->add_option("--max-iters", f.max_iters, "Iteration budget");
    cmd->add_option("--constraints", f.constraints, "Constraint JSON file");
    cmd->add_option("--init", f.init, "random or identity_if_square");
    cmd->add_option("--fit-scale", f.fit_scale, "unit or sensitivity");
  }
  cmd->add_option("--seed", f.seed, "Run seed");
}

std::vector<std::uint64_t> SeedRange(std::uint64_t first, int count) {
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < count; ++k) seeds.push_back(first + k);
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private trajectory synthesis"};
  app.require_subcommand(1);
  CommonFlags f;
  absl::Status status;

  dpe::SimSpec sim;
  std::string sim_output;
  auto* simulate = app.add_subcommand("simulate", "Generate random walks");
  simulate->add_option("--m", sim.m, "Trajectory count");
  simulate->add_option("--length", sim.length, "Points per trajectory");
  simulate->add_option("--half-width", sim.x_max, "Box is [-w, w]^2");
  simulate->add_option("--step-sigma", sim.step_sigma, "Step std deviation");
  simulate->add_option("--seed", sim.seed, "Seed");
  simulate->add_option("--output", sim_output, "CSV path ('-' for stdout)");
  simulate->callback([&] {
    sim.x_min = sim.y_min = -sim.x_max;
    sim.y_max = sim.x_max;
    status = RunSimulate(sim, sim_output);
  });

  auto* embed = app.add_subcommand("embed", "Embed and fit the transform");
  AddCommon(embed, f, true, false, true);
  embed->callback([&] { status = RunEmbed(f); });

  auto* perturb = app.add_subcommand("perturb", "Perturb the distance sums");
  AddCommon(perturb, f, false, true, false);
  perturb->callback([&] { status = RunPerturb(f); });

  auto* synthesize = app.add_subcommand("synthesize", "Synthesize trajectories");
  AddCommon(synthesize, f, false, false, true);
  synthesize->callback([&] { status = RunSynthesize(f); });

  std::string synthetic_path;
  auto* evaluate = app.add_subcommand("evaluate", "Score a synthetic dataset");
  AddCommon(evaluate, f, true, false, false);
  evaluate->add_option("--synthetic", synthetic_path, "Synthetic CSV");
  evaluate->add_option("--cell-size", f.cell_size, "Grid cell size");
  evaluate->callback([&] { status = RunEvaluate(f, synthetic_path); });

  std::string config_path;
  int synth_iters = 0;
  double pipeline_embed_lr = 0.005;
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage");
  AddCommon(pipeline, f, true, true, true);
  pipeline->add_option("--config", config_path, "JSON config; flags override");
  pipeline->add_option("--cell-size", f.cell_size, "Grid cell size");
  pipeline->add_option("--synthesis-iters", synth_iters,
                       "Synthesis budget if different from --max-iters");
  pipeline->add_option("--embed-lr", pipeline_embed_lr,
                       "Embedding learning rate");
  pipeline->callback([&] {
    status = RunPipelineCommand(f, *pipeline, config_path, synth_iters,
                                pipeline_embed_lr);
  });

  dpe::SweepConfig sweep_cfg;
  sweep_cfg.sim.m = 100;
  std::vector<std::size_t> d_primes{0};
  std::vector<double> epsilons{0.1, 0.2, 0.3, 0.4, 0.5,
                               0.6, 0.7, 0.8, 0.9, 1.0};
  int seed_count = 5;
  double embed_lr = 0.005;
  double synth_lr = 0.005;
  auto* sweep = app.add_subcommand("sweep", "Sweep epsilon and d_prime");
  sweep->add_option("--m", sweep_cfg.sim.m, "Trajectory count");
  sweep->add_option("--length", sweep_cfg.sim.length, "Points per trajectory");
  sweep->add_option("--d-prime", d_primes, "Embedding dimensions (0 = 3n)");
  sweep->add_option("--epsilon", epsilons, "Privacy budgets");
  sweep->add_option("--seeds", seed_count, "Number of run seeds");
  sweep->add_option("--seed", f.seed, "First run seed");
  sweep->add_option("--embed-lr", embed_lr, "Embedding learning rate");
  sweep->add_option("--lr", synth_lr, "Synthesis learning rate");
  sweep->add_option("--max-iters", f.max_iters, "Iteration budget");
  sweep->add_option("--init", f.init, "random or identity_if_square");
  sweep->add_option("--output-dir", f.output_dir, "Where to write CSVs");
  sweep->callback([&] {
    auto init = InitFromFlag(f.init);
    if (!init.ok()) {
      status = init.status();
      return;
    }
    sweep_cfg.d_primes = d_primes;
    sweep_cfg.epsilons = epsilons;
    sweep_cfg.seeds = SeedRange(f.seed, seed_count);
    sweep_cfg.embedding.learning_rate = embed_lr;
    sweep_cfg.embedding.max_iters = f.max_iters;
    sweep_cfg.embedding.init = *init;
    sweep_cfg.synthesis.learning_rate = synth_lr;
    sweep_cfg.synthesis.max_iters = f.max_iters;
    auto rows = dpe::RunSweep(sweep_cfg);
    if (!rows.ok()) {
      status = rows.status();
      return;
    }
    const std::string mean = dpe::SweepCsv(dpe::AverageOverSeeds(*rows));
    std::cout << mean;
    if (!f.output_dir.empty()) {
      status = EnsureDir(f.output_dir);
      if (status.ok()) {
        status = dpe::WriteTextFile(PathIn(f.output_dir, "sweep.csv"),
                                    dpe::SweepCsv(*rows));
      }
      if (status.ok()) {
        status = dpe::WriteTextFile(PathIn(f.output_dir, "sweep_mean.csv"),
                                    mean);
      }
    }
  });

  dpe::ConstraintsExperimentConfig demo;
  demo.sim.m = 50;
  demo.synthesis.learning_rate = 0.1;
  auto* constraints_demo =
      app.add_subcommand("constraints-demo", "Run with and without penalties");
  constraints_demo->add_option("--m", demo.sim.m, "Trajectory count");
  constraints_demo->add_option("--length", demo.sim.length, "Points each");
  constraints_demo->add_option("--epsilon", demo.epsilon, "Privacy budget");
  constraints_demo->add_option("--lr", demo.synthesis.learning_rate,
                               "Synthesis learning rate");
  constraints_demo->add_option("--max-iters", demo.synthesis.max_iters,
                               "Synthesis budget");
  constraints_demo->add_option("--seed", demo.seed, "Run seed");
  constraints_demo->add_option("--constraints", f.constraints,
                               "Constraint JSON (default: disc r=2, box)");
  std::string demo_fit_scale = "sensitivity";
  constraints_demo->add_option("--fit-scale", demo_fit_scale,
                               "unit or sensitivity");
  constraints_demo->add_option("--output-dir", f.output_dir, "Artifacts");
  constraints_demo->callback([&] {
    auto constraints = LoadConstraints(f.constraints);
    auto mode = dpe::ParseFitScaleMode(demo_fit_scale);
    if (!constraints.ok() || !mode.ok()) {
      status = !constraints.ok() ? constraints.status() : mode.status();
      return;
    }
    demo.sim.seed = demo.seed;
    demo.fit_scale_mode = *mode;
    demo.constraints = constraints->empty()
                           ? std::vector<dpe::ConstraintSpec>{
                                 {dpe::ForbiddenDisc{0.0, 0.0, 2.0}, {}, 0.3},
                                 {dpe::ScopeBoundary{-10.0, 10.0, -10.0, 10.0},
                                  {}, 5.0}}
                           : std::move(*constraints);
    auto result = dpe::RunConstraintsExperiment(demo);
    if (!result.ok()) {
      status = result.status();
      return;
    }
    std::cout << result->report.dump(2) << "\n";
    if (!f.output_dir.empty()) {
      status = EnsureDir(f.output_dir);
      if (!status.ok()) return;
      status = dpe::WriteJsonFile(PathIn(f.output_dir, "constraints_report.json"),
                                  result->report);
      for (const auto& [name, data] :
           {std::pair{"synthetic_penalized.csv", &result->penalized_dataset},
            std::pair{"synthetic_unpenalized.csv",
                      &result->unpenalized_dataset}}) {
        if (!status.ok()) return;
        std::ostringstream csv;
        dpe::WriteDatasetCsv(csv, *data, dpe::Projection{});
        status = dpe::WriteTextFile(PathIn(f.output_dir, name), csv.str());
      }
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed artifact: " << e.what() << "\n";
    return kExitValidation;
  }
  return Report(status);
}
