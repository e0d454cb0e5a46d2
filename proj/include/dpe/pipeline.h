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

// End-to-end orchestration: ingest, embed, perturb, synthesize, evaluate.
// Each stage is also exposed on its own so it can be rerun from the
// artifacts of the previous one.

#ifndef DPE_PIPELINE_H_
#define DPE_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpe/constraints.h"
#include "dpe/dp_mechanism.h"
#include "dpe/embedder.h"
#include "dpe/ingest.h"
#include "dpe/metric.h"
#include "dpe/serialize.h"
#include "dpe/simulate.h"
#include "dpe/synthesizer.h"
#include "dpe/utility_metrics.h"

namespace dpe {

// Substreams of the run seed.
inline constexpr std::uint64_t kEmbeddingStream = 0x656d6264;
inline constexpr std::uint64_t kNoiseStream = 0x6e6f6973;

// Units of the synthesis fit residuals.
enum class FitScaleMode {
  kUnit,         // fit_scale = 1
  kSensitivity,  // fit_scale = lambda of the dataset scope
};

absl::StatusOr<FitScaleMode> ParseFitScaleMode(const std::string& s);
const char* FitScaleModeName(FitScaleMode mode);

struct PipelineConfig {
  std::string input_path;
  CoordinateFormat format = CoordinateFormat::kCsvXy;
  std::size_t d_prime = 0;  // 0 selects 3n
  double time_scale = 1.0;
  OptimizerConfig embedding;
  double epsilon = 1.0;
  std::optional<std::uint64_t> seed;
  bool zero_noise = false;  // forces lambda to 0
  SynthesisConfig synthesis;
  FitScaleMode fit_scale_mode = FitScaleMode::kUnit;
  bool evaluate = true;
  double cell_size = kDefaultCellSize;
  std::string output_dir;
};

absl::Status ValidatePipelineConfig(const PipelineConfig& cfg);

// Reads a JSON config; keys absent from `j` keep the values in `base`.
absl::StatusOr<PipelineConfig> PipelineConfigFromJson(const Json& j,
                                                      PipelineConfig base = {});
// Echo of the run settings (without filesystem paths).
Json ToJson(const PipelineConfig& cfg);

// Everything derived from the original data before the embedding.
struct PreparedDataset {
  ProjectedDataset projected;
  AlignedDataset aligned;
  Matrix flat;  // m x 3n, time scaled
  double time_scale = 1.0;
  Sensitivity sensitivity;
};

absl::StatusOr<PreparedDataset> Prepare(const std::vector<RawTrajectory>& raw,
                                        CoordinateFormat format,
                                        double time_scale);
absl::StatusOr<PreparedDataset> PrepareFromFile(const std::string& path,
                                                CoordinateFormat format,
                                                double time_scale);
// Planar trajectories, e.g. from Simulate.
absl::StatusOr<PreparedDataset> PrepareFromTrajectories(
    const std::vector<Trajectory>& trajectories, double time_scale);

// Projection, scope, sensitivity and ids of a prepared dataset.
Json DatasetMetaJson(const PreparedDataset& data);

struct EmbedStage {
  EmbeddedDataset embedding;
  TransformFn transform;
  DistanceSums sums;
};

absl::StatusOr<EmbedStage> RunEmbedStage(const PreparedDataset& data,
                                         std::size_t d_prime,
                                         const OptimizerConfig& cfg);

absl::StatusOr<PerturbedSums> RunPerturbStage(const DistanceSums& sums,
                                              const Sensitivity& sensitivity,
                                              double epsilon,
                                              std::uint64_t seed,
                                              bool zero_noise);

// `scope_lambda` is the sensitivity of the data scope, used by
// kSensitivity even when the noise was forced to zero.
absl::StatusOr<SynthesisResult> RunSynthesisStage(
    const EmbeddedDataset& embedding, const PerturbedSums& perturbed,
    const TransformFn& transform, SynthesisConfig cfg, FitScaleMode mode,
    double scope_lambda, double time_scale);

Json SynthesisJson(const SynthesisResult& result, double fit_scale);

// Synthetic trajectories in the input frame, as CSV.
std::string SyntheticCsv(const SynthesisResult& result,
                         const Projection& projection);

// Reads synthetic CSV back into the original planar frame and scores it
// against the aligned original.
absl::StatusOr<UtilityReport> EvaluateCsv(const PreparedDataset& original,
                                          const std::string& synthetic_csv,
                                          double cell_size);

struct PipelineReport {
  Json report;   // deterministic for a fixed config and seed
  Json timings;  // wall-clock seconds per stage
  UtilityReport metrics;
  SynthesisResult synthesis;
  std::string synthetic_csv;
};

// Runs every stage. When cfg.output_dir is set, writes dataset.json,
// distance_sums.json, embedding.json, transform.json, perturbed_sums.json,
// synthesis.json, synthetic.csv, metrics.json, the plot CSVs, report.json and
// timings.json there.
absl::StatusOr<PipelineReport> RunPipeline(const PipelineConfig& cfg);

// Same, on data that is already loaded.
absl::StatusOr<PipelineReport> RunPipeline(const PipelineConfig& cfg,
                                           const PreparedDataset& data);

struct SweepConfig {
  SimSpec sim;
  std::vector<std::size_t> d_primes;  // 0 selects 3n
  std::vector<double> epsilons;
  std::vector<std::uint64_t> seeds;  // run seeds; the dataset uses sim.seed
  double time_scale = 1.0;
  OptimizerConfig embedding;
  SynthesisConfig synthesis;
  FitScaleMode fit_scale_mode = FitScaleMode::kUnit;
  double cell_size = 1.0;
};

struct SweepRow {
  std::size_t d_prime = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  UtilityReport metrics;
};

// Cross product of d_primes x epsilons x seeds. Embeddings are computed once
// per (d_prime, seed) and shared across epsilons.
absl::StatusOr<std::vector<SweepRow>> RunSweep(const SweepConfig& cfg);

// Rows averaged over seeds, one per (d_prime, epsilon), ordered by d_prime
// then epsilon. The seed field holds the number of seeds averaged.
std::vector<SweepRow> AverageOverSeeds(const std::vector<SweepRow>& rows);

std::string SweepCsv(const std::vector<SweepRow>& rows);

struct ViolationCounts {
  std::size_t points = 0;
  std::vector<std::size_t> inside_region;  // per constraint, disc/box only
  std::size_t outside_scope = 0;           // beyond the box by > tolerance
  double max_outside = 0.0;

  double InsideFraction(std::size_t k) const {
    return points > 0 ? static_cast<double>(inside_region[k]) / points : 0.0;
  }
};

// Points strictly inside each forbidden region, and points farther than
// `tolerance` outside `box`.
ViolationCounts CountViolations(const std::vector<Trajectory>& synthetic,
                                const std::vector<ConstraintSpec>& constraints,
                                const ScopeBoundary& box, double tolerance);

struct ConstraintsExperimentConfig {
  SimSpec sim;
  std::size_t d_prime = 0;
  double epsilon = 0.01;
  std::uint64_t seed = 0;
  double time_scale = 1.0;
  OptimizerConfig embedding;
  SynthesisConfig synthesis;  // its constraints are ignored
  std::vector<ConstraintSpec> constraints;
  FitScaleMode fit_scale_mode = FitScaleMode::kSensitivity;
  double scope_tolerance = 1e-2;
};

struct ConstraintsReport {
  ViolationCounts penalized;
  ViolationCounts unpenalized;
  std::vector<Trajectory> penalized_dataset;
  std::vector<Trajectory> unpenalized_dataset;
  Json report;
};

// Runs synthesis with and without the penalties from one embedding and one
// noise draw.
absl::StatusOr<ConstraintsReport> RunConstraintsExperiment(
    const ConstraintsExperimentConfig& cfg);

}  // namespace dpe

#endif  // DPE_PIPELINE_H_
