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

// JSON forms of the stage artifacts. Doubles are written in shortest
// round-trip form, so reading an artifact back reproduces it bit for bit.

#ifndef DPE_SERIALIZE_H_
#define DPE_SERIALIZE_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpe/constraints.h"
#include "dpe/dp_mechanism.h"
#include "dpe/embedder.h"
#include "dpe/ingest.h"
#include "dpe/metric.h"
#include "dpe/utility_metrics.h"
#include "json.hpp"

namespace dpe {

using Json = nlohmann::ordered_json;

Json ToJson(const Matrix& m);
absl::StatusOr<Matrix> MatrixFromJson(const Json& j);

Json ToJson(const DistanceSums& s);
absl::StatusOr<DistanceSums> DistanceSumsFromJson(const Json& j);

Json ToJson(const PerturbedSums& s);
absl::StatusOr<PerturbedSums> PerturbedSumsFromJson(const Json& j);

Json ToJson(const EmbeddedDataset& e);
absl::StatusOr<EmbeddedDataset> EmbeddedDatasetFromJson(const Json& j);

Json ToJson(const TransformFn& t);
absl::StatusOr<TransformFn> TransformFromJson(const Json& j);

Json ToJson(const ConstraintSpec& c);
absl::StatusOr<ConstraintSpec> ConstraintFromJson(const Json& j);

// Accepts either a list or {"constraints": [...]}.
absl::StatusOr<std::vector<ConstraintSpec>> ConstraintsFromJson(const Json& j);

Json ToJson(const Projection& p);
absl::StatusOr<Projection> ProjectionFromJson(const Json& j);

Json ToJson(const Scope& s);
absl::StatusOr<Scope> ScopeFromJson(const Json& j);

Json ToJson(const Sensitivity& s);
absl::StatusOr<Sensitivity> SensitivityFromJson(const Json& j);

Json ToJson(const UtilityReport& r);

absl::StatusOr<Json> ReadJsonFile(const std::string& path);
absl::Status WriteJsonFile(const std::string& path, const Json& j);
absl::Status WriteTextFile(const std::string& path, const std::string& text);
absl::StatusOr<std::string> ReadTextFile(const std::string& path);

}  // namespace dpe

#endif  // DPE_SERIALIZE_H_
