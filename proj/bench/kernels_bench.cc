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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "dpe/kernels.h"

namespace dpe {
namespace {

Matrix Random(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = u(rng);
  return m;
}

template <bool kParallel>
void BM_PairwiseDistances(benchmark::State& state) {
  const Matrix p = Random(state.range(0), state.range(1), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kParallel ? kernels::PairwiseDistances(p)
                                       : kernels::serial::PairwiseDistances(p));
  }
  state.counters["threads"] = kParallel ? kernels::MaxThreads() : 1;
}

template <bool kParallel>
void BM_StressGradient(benchmark::State& state) {
  const std::size_t m = state.range(0), d = state.range(1);
  const Matrix y = Random(m, d, 2);
  const Matrix target = kernels::serial::PairwiseDistances(Random(m, d, 3));
  const Matrix current = kernels::serial::PairwiseDistances(y);
  Matrix grad(m, d);
  for (auto _ : state) {
    if (kParallel) {
      kernels::StressGradient(y, target, current, grad);
    } else {
      kernels::serial::StressGradient(y, target, current, grad);
    }
    benchmark::DoNotOptimize(grad.data().data());
  }
}

template <bool kParallel>
void BM_SumResidualGradient(benchmark::State& state) {
  const std::size_t m = state.range(0), d = state.range(1);
  const Matrix y = Random(m, d, 4);
  const Matrix current = kernels::serial::PairwiseDistances(y);
  const Matrix r = Random(1, m, 5);
  Matrix grad(m, d);
  for (auto _ : state) {
    if (kParallel) {
      kernels::SumResidualGradient(y, current, r.data(), 0.5, grad);
    } else {
      kernels::serial::SumResidualGradient(y, current, r.data(), 0.5, grad);
    }
    benchmark::DoNotOptimize(grad.data().data());
  }
}

template <bool kParallel>
void BM_AffineRows(benchmark::State& state) {
  const std::size_t m = state.range(0), d = state.range(1);
  const Matrix w = Random(d, d, 6), in = Random(m, d, 7);
  const Matrix bias = Random(1, d, 8);
  Matrix out(m, d);
  for (auto _ : state) {
    if (kParallel) {
      kernels::AffineRows(w, bias.data(), in, out);
    } else {
      kernels::serial::AffineRows(w, bias.data(), in, out);
    }
    benchmark::DoNotOptimize(out.data().data());
  }
}

// (m, D'): the simulated experiment sizes.
void Sizes(benchmark::internal::Benchmark* b) {
  b->Args({100, 300})->Args({500, 300})->Args({1000, 60})->Unit(benchmark::kMillisecond);
}

BENCHMARK(BM_PairwiseDistances<false>)->Apply(Sizes)->Name("PairwiseDistances/serial");
BENCHMARK(BM_PairwiseDistances<true>)->Apply(Sizes)->Name("PairwiseDistances/omp");
BENCHMARK(BM_StressGradient<false>)->Apply(Sizes)->Name("StressGradient/serial");
BENCHMARK(BM_StressGradient<true>)->Apply(Sizes)->Name("StressGradient/omp");
BENCHMARK(BM_SumResidualGradient<false>)->Apply(Sizes)->Name("SumResidualGradient/serial");
BENCHMARK(BM_SumResidualGradient<true>)->Apply(Sizes)->Name("SumResidualGradient/omp");
BENCHMARK(BM_AffineRows<false>)->Apply(Sizes)->Name("AffineRows/serial");
BENCHMARK(BM_AffineRows<true>)->Apply(Sizes)->Name("AffineRows/omp");

}  // namespace
}  // namespace dpe

BENCHMARK_MAIN();
