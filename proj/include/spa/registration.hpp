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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spa/geometry.hpp"
#include "spa/pointhop.hpp"

namespace spa {

/// One matched pair: a target point and the source point paired with it.
struct Correspondence {
  std::size_t target_index = 0;
  std::size_t source_index = 0;
  Vec3 target_point = Vec3::Zero();
  Vec3 source_point = Vec3::Zero();
};

using CorrespondenceSet = std::vector<Correspondence>;

/// For each target row, the source row with the smallest Euclidean feature
/// distance (lower index on ties). Source rows may be used more than once.
/// Returns, per target row, the chosen source row.
std::vector<std::size_t> nearest_feature_rows(const FeatureMatrix& target_features,
                                              const FeatureMatrix& source_features);

/// Pairs salient target points with salient source points by feature
/// distance. `target_indices` / `source_indices` select the rows (and cloud
/// points) taking part on each side.
CorrespondenceSet match_correspondences(const PointCloud& target,
                                        const FeatureMatrix& target_features,
                                        std::span<const std::size_t> target_indices,
                                        const PointCloud& source,
                                        const FeatureMatrix& source_features,
                                        std::span<const std::size_t> source_indices);

/// Closed-form least-squares rigid fit including the diagnostics needed to
/// audit the reflection correction.
struct ProcrustesSolution {
  RigidTransform transform;      // maps `from` onto `to`
  Mat3 raw_rotation;             // V U^T before the determinant correction
  Vec3 singular_values;          // descending
  bool reflection_corrected = false;
};

/// Least-squares rigid transform with to_i ~ R from_i + t. Centroids, the
/// cross-covariance sum (from_i - mean)(to_i - mean)^T and its SVD give
/// R = V diag(1, 1, det(V U^T)) U^T and t = mean_to - R mean_from. Throws
/// DegenerateGeometry for fewer than 3 pairs or when the two smallest
/// singular values are both below 1e-12.
ProcrustesSolution solve_procrustes(std::span<const Vec3> from, std::span<const Vec3> to);

/// Transform that maps the target-side points of `pairs` onto their
/// source-side points (target -> source). Invert it for the source -> target
/// alignment.
RigidTransform estimate_transform_svd(const CorrespondenceSet& pairs);

/// Mean over i of |R x_i + t - y_i|^2 for index-aligned target x and source y.
double residual_mse(const PointCloud& target, const PointCloud& source,
                    const RigidTransform& t);

enum class SelectionStrategy { Salient, Farthest, Random };

struct SpaOptions {
  std::size_t salient_points = 32;
  std::size_t iterations = 10;
  std::size_t saliency_k = 32;
  double pool_fraction = 0.25;
  SelectionStrategy selection = SelectionStrategy::Salient;
  // Match salient target points against every source point instead of the
  // salient source points only.
  bool match_all_source = false;
  std::uint64_t selection_seed = 0;  // used by SelectionStrategy::Random
  // An iteration whose increment rotates less than this and translates less
  // than `stop_translation` ends the loop.
  double stop_rotation_deg = 0.01;
  double stop_translation = 1e-5;
};

struct IterationRecord {
  RigidTransform increment;   // source -> target increment of this iteration
  double residual_rmse = 0.0; // over the matched pairs, after the increment
};

struct RegistrationResult {
  RigidTransform transform;   // source -> target, composition of increments
  std::vector<IterationRecord> per_iteration;
  std::size_t iterations_run = 0;
  bool converged = false;           // stopped on a negligible increment
  bool degenerate = false;          // an estimate failed; result is partial
  bool residual_increased = false;  // some iteration raised the residual
};

/// Indices of the M points SPA uses on one cloud for the chosen strategy.
/// Every strategy is a deterministic function of the cloud and the options;
/// the random strategy draws one index subset from `selection_seed`, so two
/// clouds of equal size get the same indices.
std::vector<std::size_t> select_points(const PointCloud& cloud, const SpaOptions& options);

/// Iterative salient-point registration of `source` onto `target`.
RegistrationResult register_spa(const PointCloud& target, const PointCloud& source,
                                const FeatureExtractor& extractor,
                                const SpaOptions& options = {});

struct IcpOptions {
  std::size_t iterations = 50;
  double tolerance = 1e-10;  // stop when the residual RMSE changes less
};

/// Point-to-point ICP of `source` onto `target` with 3D nearest neighbors.
RegistrationResult register_icp(const PointCloud& target, const PointCloud& source,
                                const IcpOptions& options = {});

}  // namespace spa
