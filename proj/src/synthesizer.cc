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

#include "dpe/synthesizer.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dpe/gradient_descent.h"
#include "dpe/kernels.h"

namespace dpe {
namespace {

absl::Status Validate(const Matrix& candidate, const PerturbedSums& targets,
                      const TransformFn& transform,
                      const SynthesisConfig& cfg) {
  if (candidate.rows() < 2) {
    return absl::InvalidArgumentError("synthesis needs at least two rows");
  }
  if (targets.sums.size() != candidate.rows()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%d targets for %d candidate rows", targets.sums.size(),
                        candidate.rows()));
  }
  if (transform.input_dim() != candidate.cols() ||
      transform.bias.size() != transform.output_dim()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("transform expects %d columns, candidate has %d",
                        transform.input_dim(), candidate.cols()));
  }
  if (transform.output_dim() % 3 != 0) {
    return absl::InvalidArgumentError(
        "transform output is not a flattened trajectory");
  }
  if (!(cfg.fit_scale > 0.0) || !(cfg.time_scale > 0.0)) {
    return absl::InvalidArgumentError("fit_scale and time_scale must be > 0");
  }
  for (const auto& c : cfg.constraints) {
    if (auto s = ValidateConstraint(c); !s.ok()) return s;
  }
  return absl::OkStatus();
}

// Loss and gradient at `point`. Constraints with mu = 0 are skipped, so an
// all-zero penalty set runs the exact same arithmetic as no constraints.
class SynthesisObjective {
 public:
  SynthesisObjective(const PerturbedSums& targets, const TransformFn& transform,
            const SynthesisConfig& cfg, std::size_t m)
      : targets_(targets),
        transform_(transform),
        cfg_(cfg),
        denom_(static_cast<double>(m - 1) * cfg.fit_scale),
        sums_(m),
        residuals_(m) {
    for (const auto& c : cfg.constraints) {
      if (c.mu > 0.0) active_.push_back(&c);
    }
  }

  double operator()(const Matrix& point, Matrix* grad) {
    const Matrix distances = kernels::PairwiseDistances(point);
    kernels::RowSums(distances, sums_);
    double loss = 0.0;
    for (std::size_t i = 0; i < sums_.size(); ++i) {
      residuals_[i] = (sums_[i] - targets_.sums[i]) / denom_;
      loss += residuals_[i] * residuals_[i];
    }
    if (grad != nullptr) {
      kernels::SumResidualGradient(point, distances, residuals_, 2.0 / denom_,
                                   *grad);
    }
    if (active_.empty()) return loss;

    Matrix trajectories(point.rows(), transform_.output_dim());
    kernels::AffineRows(transform_.weights, transform_.bias, point,
                        trajectories);
    Matrix traj_grad(trajectories.rows(), trajectories.cols());
    for (const ConstraintSpec* c : active_) {
      loss += c->mu * EvaluatePenalty(*c, trajectories, cfg_.time_scale);
      if (grad != nullptr) {
        AccumulatePenaltyGradient(*c, trajectories, cfg_.time_scale, c->mu,
                                  traj_grad);
      }
    }
    if (grad != nullptr) {
      Matrix back(point.rows(), point.cols());
      kernels::TransposedRows(transform_.weights, traj_grad, back);
      auto g = grad->data();
      const auto b = back.data();
      for (std::size_t k = 0; k < g.size(); ++k) g[k] += b[k];
    }
    return loss;
  }

  const std::vector<double>& sums() const { return sums_; }

 private:
  const PerturbedSums& targets_;
  const TransformFn& transform_;
  const SynthesisConfig& cfg_;
  const double denom_;
  std::vector<const ConstraintSpec*> active_;
  std::vector<double> sums_;
  std::vector<double> residuals_;
};

}  // namespace

absl::StatusOr<double> SynthesisLoss(const Matrix& candidate,
                                     const PerturbedSums& targets,
                                     const TransformFn& transform,
                                     const SynthesisConfig& cfg) {
  if (auto s = Validate(candidate, targets, transform, cfg); !s.ok()) return s;
  SynthesisObjective objective(targets, transform, cfg, candidate.rows());
  return objective(candidate, nullptr);
}

absl::StatusOr<Matrix> SynthesisGradient(const Matrix& candidate,
                                         const PerturbedSums& targets,
                                         const TransformFn& transform,
                                         const SynthesisConfig& cfg) {
  if (auto s = Validate(candidate, targets, transform, cfg); !s.ok()) return s;
  SynthesisObjective objective(targets, transform, cfg, candidate.rows());
  Matrix grad(candidate.rows(), candidate.cols());
  objective(candidate, &grad);
  return grad;
}

absl::StatusOr<SynthesisResult> Synthesize(const EmbeddedDataset& embedded,
                                           const PerturbedSums& targets,
                                           const TransformFn& transform,
                                           const SynthesisConfig& cfg) {
  const Matrix& start = embedded.points;
  if (auto s = Validate(start, targets, transform, cfg); !s.ok()) return s;

  SynthesisObjective objective(targets, transform, cfg, start.rows());
  DescentOptions options{cfg.learning_rate, cfg.max_iters, cfg.tolerance,
                         "synthesis"};
  auto descent = GradientDescent(
      start, options,
      [&](const Matrix& point, Matrix& grad) { return objective(point, &grad); });
  if (!descent.ok()) return descent.status();

  SynthesisResult out;
  out.embedded = std::move(descent->best);
  out.final_loss = descent->best_loss;
  out.loss_trace = std::move(descent->loss_trace);
  out.iterations = descent->iterations;

  objective(out.embedded, nullptr);
  out.residuals.resize(start.rows());
  for (std::size_t i = 0; i < out.residuals.size(); ++i) {
    out.residuals[i] = std::fabs(objective.sums()[i] - targets.sums[i]);
  }

  auto mapped = ApplyTransform(transform, out.embedded);
  if (!mapped.ok()) return mapped.status();
  out.trajectories = std::move(*mapped);
  for (const auto& c : cfg.constraints) {
    const double p = EvaluatePenalty(c, out.trajectories, cfg.time_scale);
    out.penalties.push_back({c.kind(), c.mu, p});
    out.total_penalty += c.mu * p;
  }
  auto dataset = Unflatten(out.trajectories, cfg.time_scale);
  if (!dataset.ok()) return dataset.status();
  out.dataset = std::move(*dataset);
  return out;
}

}  // namespace dpe
