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

#include "dpe/utility_metrics.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpe {
namespace {

using ::testing::HasSubstr;
using testing::MakeTrajectory;

// Direct base-2 evaluation of 0.5 KL(p||m) + 0.5 KL(q||m).
double OracleJsd(const std::vector<double>& p, const std::vector<double>& q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0) acc += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0) acc += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return acc;
}

std::vector<double> RandomSimplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::bernoulli_distribution zero(0.2);
  std::vector<double> v(n);
  double s = 0.0;
  for (double& x : v) {
    x = zero(rng) ? 0.0 : e(rng);
    s += x;
  }
  if (s == 0.0) {
    v[0] = 1.0;
    s = 1.0;
  }
  for (double& x : v) x /= s;
  return v;
}

TEST(JsdTest, Examples) {
  EXPECT_EQ(*Jsd({0.25, 0.75}, {0.25, 0.75}), 0.0);
  EXPECT_NEAR(*Jsd({1, 0}, {0, 1}), 1.0, 1e-9);
  EXPECT_NEAR(OracleJsd({1, 0}, {0, 1}), 1.0, 1e-12);
}

TEST(JsdTest, IdentitySymmetryRangeOnRandomPairs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 30;
    const auto p = RandomSimplex(rng, n), q = RandomSimplex(rng, n);
    const double pq = *Jsd(p, q), qp = *Jsd(q, p);
    EXPECT_GE(pq, 0.0);
    EXPECT_LE(pq, 1.0);
    EXPECT_NEAR(pq, qp, 1e-12);
    EXPECT_NEAR(pq, OracleJsd(p, q), 1e-12);
    EXPECT_EQ(*Jsd(p, p), 0.0);
    if (p != q) EXPECT_GT(pq, 0.0);
  }
}

TEST(JsdTest, Validation) {
  EXPECT_THAT(std::string(Jsd({0, 0}, {0.5, 0.5}).status().message()),
              HasSubstr("p is all zero"));
  EXPECT_THAT(std::string(Jsd({0.5, 0.5}, {0, 0}).status().message()),
              HasSubstr("q is all zero"));
  EXPECT_FALSE(Jsd({1}, {0.5, 0.5}).ok());
  EXPECT_FALSE(Jsd({0.5, 0.6}, {0.5, 0.5}).ok());
  EXPECT_FALSE(Jsd({1.5, -0.5}, {0.5, 0.5}).ok());
}

TEST(MakeHistogramTest, EdgesAndTopValue) {
  const auto h = MakeHistogram({0.0, 0.5, 1.0, 2.0, 4.0}, 0.0, 4.0, 4);
  EXPECT_EQ(h.bin_edges, (std::vector<double>{0, 1, 2, 3, 4}));
  EXPECT_EQ(h.counts, (std::vector<std::int64_t>{2, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(h.normalized[0], 0.4);
  const auto empty = MakeHistogram({}, 0.0, 1.0, 3);
  EXPECT_EQ(empty.normalized, (std::vector<double>{0, 0, 0}));
}

TEST(TrajectoryLengthTest, Examples) {
  EXPECT_EQ(TrajectoryLength(MakeTrajectory("a", {{1, 1, 0}})), 0.0);
  EXPECT_DOUBLE_EQ(TrajectoryLength(MakeTrajectory("a", {{0, 0, 0}, {3, 4, 9}})), 5.0);
  // Padding copies add nothing; time is ignored.
  EXPECT_DOUBLE_EQ(TrajectoryLength(MakeTrajectory(
                       "a", {{0, 0, 0}, {0, 0, 0}, {3, 4, 100}, {3, 4, 100}})),
                   5.0);
}

std::vector<Trajectory> RandomDataset(std::uint64_t seed, std::size_t m,
                                      std::size_t n, double half = 500.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-half, half);
  std::vector<Trajectory> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    out[i].id = std::to_string(i);
    for (std::size_t k = 0; k < n; ++k) out[i].points.push_back({u(rng), u(rng), 1.0 * k});
  }
  return out;
}

TEST(UtilityErrorsTest, SelfComparisonIsZero) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = RandomDataset(seed, 30, 8);
    EXPECT_EQ(*LengthDensityError(d, d), 0.0);
    EXPECT_EQ(*TrajectoryDensityError(d, d), 0.0);
    EXPECT_EQ(*TripError(d, d), 0.0);
    EXPECT_EQ(*MseTrajectories(d, d), 0.0);
    EXPECT_EQ(*MseHeatmap(d, d), 0.0);
    const auto r = EvaluateUtility(d, d);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r->length_density_error + r->trajectory_density_error +
                  r->trip_error + r->mse_trajectories + r->mse_heatmap,
              0.0);
  }
}

TEST(LengthDensityErrorTest, DisjointBinsGiveOne) {
  const std::vector<Trajectory> still{MakeTrajectory("a", {{0, 0, 0}, {0, 0, 1}}),
                                      MakeTrajectory("b", {{5, 5, 0}, {5, 5, 1}})};
  const std::vector<Trajectory> moving{MakeTrajectory("c", {{0, 0, 0}, {30, 40, 1}})};
  EXPECT_NEAR(*LengthDensityError(still, moving), 1.0, 1e-9);
}

TEST(LengthDensityErrorTest, InvariantUnderPermutation) {
  auto a = RandomDataset(1, 40, 6), b = RandomDataset(2, 25, 6);
  const double base = *LengthDensityError(a, b);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    EXPECT_EQ(*LengthDensityError(a, b), base);
  }
}

TEST(TrajectoryDensityErrorTest, SeparateCellsGiveOne) {
  const std::vector<Trajectory> a{MakeTrajectory("a", {{10, 10, 0}, {20, 20, 1}})};
  const std::vector<Trajectory> b{MakeTrajectory("b", {{510, 10, 0}, {520, 30, 1}})};
  EXPECT_NEAR(*TrajectoryDensityError(a, b), 1.0, 1e-9);
  EXPECT_NEAR(*TrajectoryDensityError(a, b, 1000.0), 0.0, 1e-12);
}

TEST(TripErrorTest, Examples) {
  const auto fwd = MakeTrajectory("f", {{0, 0, 0}, {150, 0, 1}, {350, 0, 2}});
  auto rev = fwd;
  std::reverse(rev.points.begin(), rev.points.end());
  EXPECT_EQ(*TripError({fwd}, {fwd}), 0.0);
  EXPECT_GT(*TripError({fwd}, {rev}), 0.0);
  // Same start and end cells, different paths.
  const auto other = MakeTrajectory("o", {{10, 20, 0}, {90, 99, 1}, {399, 50, 2}});
  EXPECT_EQ(*TripError({fwd, fwd}, {other}), 0.0);
}

TEST(MseTrajectoriesTest, Examples) {
  const Matrix a = testing::RandomMatrix(4, 6, 1);
  Matrix plus = a;
  for (double& v : plus.data()) v += 1.0;
  EXPECT_EQ(*MseTrajectories(a, a), 0.0);
  EXPECT_NEAR(*MseTrajectories(a, plus), 1.0, 1e-12);
  Matrix one = a;
  one(2, 3) += 3.0;
  EXPECT_NEAR(*MseTrajectories(a, one), 9.0 / 24.0, 1e-12);
  EXPECT_FALSE(MseTrajectories(a, Matrix(4, 3)).ok());

  const auto d = RandomDataset(5, 3, 4);
  auto shifted = d;
  for (auto& t : shifted) for (auto& p : t.points) p.t += 1.0;
  EXPECT_NEAR(*MseTrajectories(d, shifted), 1.0 / 3.0, 1e-12);
  EXPECT_FALSE(MseTrajectories(d, RandomDataset(5, 2, 4)).ok());
}

TEST(MseHeatmapTest, DisjointSingleCells) {
  const std::vector<Trajectory> a{MakeTrajectory("a", {{0, 0, 0}})};
  const std::vector<Trajectory> b{MakeTrajectory("b", {{250, 0, 0}})};
  // Grid is 3 x 1 cells of 100 m.
  EXPECT_NEAR(*MseHeatmap(a, b), 2.0 / 3.0, 1e-12);
}

TEST(MseHeatmapTest, DuplicatesDoNotChangeDensity) {
  const auto d = RandomDataset(8, 20, 5);
  auto doubled = d;
  doubled.insert(doubled.end(), d.begin(), d.end());
  EXPECT_NEAR(*MseHeatmap(d, doubled), 0.0, 1e-18);
  EXPECT_NEAR(*TrajectoryDensityError(d, doubled), 0.0, 1e-12);
}

TEST(GridTest, EveryPointInExactlyOneCellWithFloorConvention) {
  const std::vector<Trajectory> d{
      MakeTrajectory("a", {{0, 0, 0}, {100, 0, 1}, {99.999, 199.5, 2}, {300, 300, 3}})};
  auto grid = SharedGrid(d, d, 100.0);
  ASSERT_TRUE(grid.ok());
  EXPECT_EQ(grid->nx, 4);
  EXPECT_EQ(grid->ny, 4);
  EXPECT_EQ(CellOf(*grid, 0, 0), Cell(0, 0));
  // A point on a cell edge belongs to the cell that starts there.
  EXPECT_EQ(CellOf(*grid, 100, 0), Cell(1, 0));
  EXPECT_EQ(CellOf(*grid, 99.999, 199.5), Cell(0, 1));
  EXPECT_EQ(CellOf(*grid, 300, 300), Cell(3, 3));
  const auto counts = CountPoints(*grid, d);
  EXPECT_EQ(counts.total, 4);
  std::int64_t sum = 0;
  for (const auto& [cell, c] : counts.counts) {
    EXPECT_GE(cell.first, 0);
    EXPECT_LT(cell.first, grid->nx);
    EXPECT_GE(cell.second, 0);
    EXPECT_LT(cell.second, grid->ny);
    sum += c;
  }
  EXPECT_EQ(sum, 4);
  EXPECT_FALSE(SharedGrid(d, d, 0.0).ok());
}

TEST(UtilityErrorsTest, EmptyInputsAreErrors) {
  const auto d = RandomDataset(1, 2, 2);
  EXPECT_FALSE(LengthDensityError({}, d).ok());
  EXPECT_FALSE(TrajectoryDensityError(d, {}).ok());
  EXPECT_FALSE(TripError({}, {}).ok());
  EXPECT_FALSE(MseHeatmap({}, d).ok());
}

TEST(WriteCsvTest, HistogramAndHeatmap) {
  std::ostringstream h;
  WriteHistogramCsv(h, MakeHistogram({0.5, 1.5}, 0.0, 2.0, 2));
  EXPECT_THAT(h.str(), HasSubstr("\n"));
  std::ostringstream g;
  const auto d = RandomDataset(2, 3, 3);
  WriteHeatmapCsv(g, CountPoints(*SharedGrid(d, d, 100.0), d));
  EXPECT_FALSE(g.str().empty());
}

}  // namespace
}  // namespace dpe
