/*
 * Copyright 2026 The SPA Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "spa/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "spa/error.hpp"
#include "spa/neighbor_index.hpp"
#include "spa/shapes.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace spa {
namespace {

TEST(SaliencyTest, FlatGridHasZeroEnergy) {
  const PointCloud grid(testing::plane_grid(3));
  const SaliencyField f = local_curvature_energies(grid, 9);
  ASSERT_EQ(f.lambda.size(), 9u);
  for (double l : f.lambda) EXPECT_NEAR(l, 0.0, 1e-12);
}

TEST(SaliencyTest, EdgeBeatsFaceInterior) {
  const auto c = testing::cube_edge();
  const PointCloud cloud(c.points);
  const SaliencyField f = local_curvature_energies(cloud, 32);
  double min_edge = INFINITY, max_interior = 0.0;
  for (std::size_t i : c.edge) min_edge = std::min(min_edge, f.lambda[i]);
  for (std::size_t i : c.interior) max_interior = std::max(max_interior, f.lambda[i]);
  EXPECT_GT(min_edge, max_interior);
  for (std::size_t i = 0; i < c.points.size(); i += 7) {
    EXPECT_NEAR(f.lambda[i], testing::brute_lambda(c.points, i, 32), 1e-12);
  }
}

TEST(SaliencyTest, FullNeighborhoodGivesEqualEnergies) {
  Rng rng(3);
  const PointCloud cloud(testing::random_points(rng, 40));
  const SaliencyField f = local_curvature_energies(cloud, 40);
  for (double l : f.lambda) EXPECT_NEAR(l, f.lambda[0], 1e-12);
}

TEST(SaliencyTest, InvariantUnderRigidMotion) {
  const PointCloud cloud = generate_shape(ShapeKind::LBracket, 512, 4);
  Rng rng(8);
  const RigidTransform t(testing::random_rotation(rng), Vec3(3, -2, 5));
  const SaliencyField a = local_curvature_energies(cloud, 32);
  const SaliencyField b = local_curvature_energies(apply_transform(cloud, t), 32);
  for (std::size_t i = 0; i < cloud.size(); ++i) EXPECT_NEAR(a.lambda[i], b.lambda[i], 1e-12);
}

TEST(SaliencyTest, RejectsBadK) {
  const PointCloud grid(testing::plane_grid(3));
  EXPECT_THROW(local_curvature_energies(grid, 2), InvalidArgument);
  EXPECT_THROW(local_curvature_energies(grid, 10), InvalidArgument);
}

TEST(SalientSelectionTest, SingleSelectionIsArgmax) {
  const PointCloud cloud = generate_shape(ShapeKind::SteppedBlock, 256, 2);
  const SaliencyField f = local_curvature_energies(cloud, 16);
  const SalientSet s = select_salient_points(cloud, f, 1);
  const auto best = std::max_element(f.lambda.begin(), f.lambda.end()) - f.lambda.begin();
  ASSERT_EQ(s.indices.size(), 1u);
  EXPECT_EQ(s.indices[0], static_cast<std::size_t>(best));
  EXPECT_EQ(s.lambdas[0], f.lambda[best]);
}

TEST(SalientSelectionTest, ExhaustiveSelectionCoversEveryPoint) {
  Rng rng(21);
  const PointCloud cloud(testing::random_points(rng, 50));
  const SaliencyField f = local_curvature_energies(cloud, 8);
  const SalientSet s = select_salient_points(cloud, f, 50, 1.0);
  EXPECT_EQ(s.indices[0], argmax_lambda(f));
  auto sorted = s.indices;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(SalientSelectionTest, CubeEdgeSelectionMatchesMaximinOverPool) {
  const auto c = testing::cube_edge();
  const PointCloud cloud(c.points);
  const SaliencyField f = local_curvature_energies(cloud, 32);
  const SalientSet s = select_salient_points(cloud, f, 8, 0.25);

  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return f.lambda[a] > f.lambda[b]; });
  const auto pool_size = static_cast<std::size_t>(std::ceil(0.25 * cloud.size()));
  const std::vector<std::size_t> pool(order.begin(), order.begin() + pool_size);
  const double threshold = f.lambda[pool.back()];
  for (double l : s.lambdas) EXPECT_GE(l, threshold);
  EXPECT_EQ(s.indices, testing::brute_fps_among(c.points, pool, 8, order[0]));
  EXPECT_EQ(salient_candidate_pool(f, 0.25), pool);
}

TEST(SalientSelectionTest, EqualEnergiesReduceToFarthestPointSampling) {
  Rng rng(4);
  const PointCloud cloud(testing::random_points(rng, 100));
  SaliencyField f{std::vector<double>(100, 0.5), 8};
  const SalientSet s = select_salient_points(cloud, f, 12, 1.0);
  EXPECT_EQ(s.indices, farthest_point_sample(cloud, 12, 0));
}

TEST(SalientSelectionTest, PermutationMovesIndicesNotPositions) {
  const PointCloud cloud = generate_shape(ShapeKind::NotchedCylinder, 512, 9);
  std::vector<std::size_t> perm(cloud.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(1);
  for (std::size_t k = perm.size(); k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
  const PointCloud shuffled = cloud.subset(perm);
  const auto a = select_salient_points(cloud, local_curvature_energies(cloud, 32), 32);
  const auto b = select_salient_points(shuffled, local_curvature_energies(shuffled, 32), 32);
  ASSERT_EQ(a.indices.size(), b.indices.size());
  for (std::size_t i = 0; i < a.indices.size(); ++i) {
    EXPECT_EQ(cloud[a.indices[i]], shuffled[b.indices[i]]);
  }
}

TEST(SalientSelectionTest, RejectsPoolSmallerThanM) {
  Rng rng(2);
  const PointCloud cloud(testing::random_points(rng, 40));
  const SaliencyField f = local_curvature_energies(cloud, 8);
  EXPECT_THROW(select_salient_points(cloud, f, 11, 0.25), InvalidArgument);
  EXPECT_NO_THROW(select_salient_points(cloud, f, 10, 0.25));
  EXPECT_THROW(select_salient_points(cloud, f, 0, 1.0), InvalidArgument);
}

}  // namespace
}  // namespace spa
