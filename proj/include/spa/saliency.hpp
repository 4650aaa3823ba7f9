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
#include <vector>

#include "spa/geometry.hpp"

namespace spa {

/// Per-point curvature energy: the smallest eigenvalue of the covariance of
/// each point's k-nearest-neighbor coordinates. Flat regions score ~0; edges
/// and corners score high.
struct SaliencyField {
  std::vector<double> lambda;
  std::size_t k_neighbors = 0;
};

struct SalientSet {
  std::vector<std::size_t> indices;
  std::vector<double> lambdas;  // lambda at each selected index
};

inline constexpr std::size_t kDefaultSaliencyNeighbors = 32;
inline constexpr double kDefaultPoolFraction = 0.25;

/// The neighborhood includes the point itself and the covariance is
/// normalized by k. Negative round-off eigenvalues are clamped to zero.
/// Requires 3 <= k <= N.
SaliencyField local_curvature_energies(const PointCloud& cloud,
                                       std::size_t k = kDefaultSaliencyNeighbors);

/// Index of the largest lambda, lowest index on ties.
std::size_t argmax_lambda(const SaliencyField& field);

/// The ceil(pool_fraction * N) points with highest lambda (lower index first
/// among equal values), ordered by descending lambda.
std::vector<std::size_t> salient_candidate_pool(const SaliencyField& field,
                                                double pool_fraction);

/// Picks m salient points: the global lambda maximum first, then greedy
/// maximin distance selection inside the high-lambda candidate pool. Throws
/// InvalidArgument when the pool is smaller than m.
SalientSet select_salient_points(const PointCloud& cloud,
                                 const SaliencyField& field, std::size_t m,
                                 double pool_fraction = kDefaultPoolFraction);

}  // namespace spa
