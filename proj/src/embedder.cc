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

#include "dpe/embedder.h"

#include <algorithm>
#include <array>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dpe/dp_mechanism.h"
#include "dpe/gradient_descent.h"
#include "dpe/kernels.h"

namespace dpe {
namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

absl::Status CheckPair(const Matrix& original, const Matrix& embedded) {
  if (original.rows() != embedded.rows()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("original has %d rows, embedded has %d",
                        original.rows(), embedded.rows()));
  }
  if (original.rows() < 2) {
    return absl::InvalidArgumentError("embedding needs at least two rows");
  }
  return absl::OkStatus();
}

// Random start inside the data's per-axis bounds. Columns follow the
// (x, y, t) cycle of the flattened layout.
Matrix RandomStart(const Matrix& dataset, std::size_t d_prime,
                   std::uint64_t seed) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t axes = dataset.cols() % 3 == 0 ? 3 : 1;
  std::array<double, 3> lo{kInf, kInf, kInf};
  std::array<double, 3> hi{-kInf, -kInf, -kInf};
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    const auto row = dataset.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      lo[c % axes] = std::min(lo[c % axes], row[c]);
      hi[c % axes] = std::max(hi[c % axes], row[c]);
    }
  }
  RandomEngine rng(DeriveSeed(seed, 0));
  Matrix start(dataset.rows(), d_prime);
  for (std::size_t i = 0; i < start.rows(); ++i) {
    for (std::size_t c = 0; c < d_prime; ++c) {
      const std::size_t a = c % axes;
      start(i, c) = lo[a] + (CenteredUniform(rng) + 0.5) * (hi[a] - lo[a]);
    }
  }
  return start;
}

}  // namespace

absl::StatusOr<double> EmbeddingLoss(const Matrix& original,
                                     const Matrix& embedded) {
  if (auto s = CheckPair(original, embedded); !s.ok()) return s;
  return kernels::StressLoss(kernels::PairwiseDistances(original),
                             kernels::PairwiseDistances(embedded));
}

absl::StatusOr<double> EmbeddingRawResidual(const Matrix& original,
                                            const Matrix& embedded) {
  if (auto s = CheckPair(original, embedded); !s.ok()) return s;
  const Matrix target = kernels::PairwiseDistances(original);
  const Matrix current = kernels::PairwiseDistances(embedded);
  double acc = 0.0;
  for (std::size_t i = 0; i < target.rows(); ++i) {
    for (std::size_t j = i + 1; j < target.cols(); ++j) {
      acc += target(i, j) - current(i, j);
    }
  }
  return acc;
}

absl::StatusOr<Matrix> EmbeddingGradient(const Matrix& original,
                                         const Matrix& embedded) {
  if (auto s = CheckPair(original, embedded); !s.ok()) return s;
  Matrix grad(embedded.rows(), embedded.cols());
  kernels::StressGradient(embedded, kernels::PairwiseDistances(original),
                          kernels::PairwiseDistances(embedded), grad);
  return grad;
}

absl::StatusOr<EmbeddedDataset> Embed(const Matrix& dataset,
                                      std::size_t d_prime,
                                      const OptimizerConfig& cfg) {
  if (dataset.rows() < 2) {
    return absl::InvalidArgumentError("embedding needs at least two rows");
  }
  if (d_prime < 1) return absl::InvalidArgumentError("d_prime must be >= 1");

  EmbeddedDataset out;
  out.d_prime = d_prime;
  out.seed = cfg.seed.has_value()
                 ? *cfg.seed
                 : (static_cast<std::uint64_t>(std::random_device{}()) << 32) |
                       std::random_device{}();

  Matrix start = cfg.init == EmbeddingInit::kIdentityWhenDimensionsMatch &&
                         d_prime == dataset.cols()
                     ? dataset
                     : RandomStart(dataset, d_prime, out.seed);

  const Matrix target = kernels::PairwiseDistances(dataset);
  DescentOptions options{cfg.learning_rate, cfg.max_iters, cfg.tolerance,
                         "embedding"};
  auto result = GradientDescent(
      std::move(start), options, [&](const Matrix& point, Matrix& grad) {
        const Matrix current = kernels::PairwiseDistances(point);
        kernels::StressGradient(point, target, current, grad);
        return kernels::StressLoss(target, current);
      });
  if (!result.ok()) return result.status();
  out.points = std::move(result->best);
  out.loss_trace = std::move(result->loss_trace);
  out.iterations = result->iterations;
  return out;
}

absl::StatusOr<TransformFn> FitTransform(const Matrix& embedded,
                                         const Matrix& original) {
  if (embedded.rows() != original.rows() || embedded.rows() == 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "cannot fit a transform from %d embedded rows to %d original rows",
        embedded.rows(), original.rows()));
  }
  const auto m = static_cast<Eigen::Index>(embedded.rows());
  const auto d_in = static_cast<Eigen::Index>(embedded.cols());
  const auto d_out = static_cast<Eigen::Index>(original.cols());
  Eigen::Map<const RowMajor> x(embedded.data().data(), m, d_in);
  Eigen::Map<const RowMajor> y(original.data().data(), m, d_out);

  if (m >= 2 && (x.rowwise() - x.row(0)).cwiseAbs().maxCoeff() == 0.0) {
    return absl::InvalidArgumentError(
        "all embedded points are identical; the transform is undetermined");
  }

  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const Eigen::RowVectorXd y_mean = y.colwise().mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::MatrixXd yc = y.rowwise() - y_mean;
  // Minimum-norm least squares: xc * w^T = yc.
  const Eigen::MatrixXd wt =
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(xc).solve(yc);

  TransformFn fn;
  fn.underdetermined = m < d_in + 1;
  fn.weights = Matrix(d_out, d_in);
  Eigen::Map<RowMajor>(fn.weights.data().data(), d_out, d_in) = wt.transpose();
  const Eigen::VectorXd b = y_mean.transpose() - wt.transpose() * x_mean.transpose();
  fn.bias.assign(b.data(), b.data() + b.size());

  Matrix fitted(embedded.rows(), original.cols());
  kernels::AffineRows(fn.weights, fn.bias, embedded, fitted);
  double residual = 0.0;
  for (std::size_t k = 0; k < fitted.data().size(); ++k) {
    const double r = fitted.data()[k] - original.data()[k];
    residual += r * r;
  }
  fn.fit_residual = residual;
  return fn;
}

absl::StatusOr<Matrix> ApplyTransform(const TransformFn& fn,
                                      const Matrix& points) {
  if (points.cols() != fn.input_dim() || fn.bias.size() != fn.output_dim()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "transform expects %d columns, got %d", fn.input_dim(), points.cols()));
  }
  Matrix out(points.rows(), fn.output_dim());
  kernels::AffineRows(fn.weights, fn.bias, points, out);
  return out;
}

}  // namespace dpe
