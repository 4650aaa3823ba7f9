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

namespace spa {

/// Exact k-nearest-neighbor index over a snapshot of points (kd-tree).
///
/// Results are identical to a brute-force scan: neighbors are ordered by
/// squared Euclidean distance, and equal distances are ordered by the lower
/// point index. The index owns a copy of the points, so it stays valid when
/// the source cloud goes away. Queries are const and may run concurrently.
class NeighborIndex {
 public:
  explicit NeighborIndex(const PointCloud& cloud);
  /// Throws InvalidArgument on an empty span.
  explicit NeighborIndex(std::span<const Vec3> points);

  std::size_t size() const { return points_.size(); }
  std::span<const Vec3> points() const { return points_; }

  /// The k nearest point indices, ascending distance. Requires 1 <= k <= size().
  std::vector<std::size_t> knn(const Vec3& query, std::size_t k) const;

  /// Single nearest point index.
  std::size_t nearest(const Vec3& query) const;

 private:
  struct Node {
    // Leaf when left < 0: the node owns order_[begin, end).
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    int axis = 0;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// Greedy maximin (farthest point) sampling. The first selected index is
/// `start`; every further pick maximizes the minimum distance to the points
/// already chosen, with ties going to the lower index. Requires
/// 1 <= m <= size and start < size.
std::vector<std::size_t> farthest_point_sample(std::span<const Vec3> points,
                                               std::size_t m,
                                               std::size_t start = 0);

inline std::vector<std::size_t> farthest_point_sample(const PointCloud& cloud,
                                                      std::size_t m,
                                                      std::size_t start = 0) {
  return farthest_point_sample(cloud.points(), m, start);
}

/// Farthest point sampling restricted to `candidates` (indices into
/// `points`). `start` must be one of the candidates; ties break on the lower
/// point index.
std::vector<std::size_t> farthest_point_sample_among(
    std::span<const Vec3> points, std::span<const std::size_t> candidates,
    std::size_t m, std::size_t start);

inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace spa
