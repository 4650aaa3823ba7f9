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

#include "spa/neighbor_index.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <utility>

#include "spa/error.hpp"

namespace spa {
namespace {

constexpr std::uint32_t kLeafSize = 8;

// (squared distance, index); lexicographic order gives the tie-break rule.
using Candidate = std::pair<double, std::size_t>;

}  // namespace

NeighborIndex::NeighborIndex(const PointCloud& cloud)
    : NeighborIndex(cloud.points()) {}

NeighborIndex::NeighborIndex(std::span<const Vec3> points)
    : points_(points.begin(), points.end()) {
  if (points_.empty()) {
    throw InvalidArgument("cannot index an empty point set");
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * points_.size() / kLeafSize + 1);
  build(0, static_cast<std::uint32_t>(points_.size()));
}

std::int32_t NeighborIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{-1, -1, begin, end, 0, 0.0});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = points_[order_[begin]];
  Vec3 hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all points coincide

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  // Left holds coordinates <= split, right holds coordinates >= split.
  const double split = points_[order_[mid]][axis];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node& node = nodes_[id];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

std::vector<std::size_t> NeighborIndex::knn(const Vec3& query,
                                            std::size_t k) const {
  if (k == 0 || k > points_.size()) {
    throw InvalidArgument("knn: k=" + std::to_string(k) +
                          " must be in [1, " + std::to_string(points_.size()) +
                          "]");
  }
  std::priority_queue<Candidate> best;  // max-heap: worst candidate on top

  auto visit = [&](auto&& self, std::int32_t id) -> void {
    const Node& node = nodes_[id];
    if (node.left < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::size_t idx = order_[i];
        const Candidate c{squared_distance(points_[idx], query), idx};
        if (best.size() < k) {
          best.push(c);
        } else if (c < best.top()) {
          best.pop();
          best.push(c);
        }
      }
      return;
    }
    const double diff = query[node.axis] - node.split;
    const std::int32_t near_side = diff <= 0.0 ? node.left : node.right;
    const std::int32_t far_side = diff <= 0.0 ? node.right : node.left;
    self(self, near_side);
    // Equal bound must still be visited: a tied point may have a lower index.
    if (best.size() < k || diff * diff <= best.top().first) {
      self(self, far_side);
    }
  };
  visit(visit, 0);

  std::vector<std::size_t> out(best.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = best.top().second;
    best.pop();
  }
  return out;
}

std::size_t NeighborIndex::nearest(const Vec3& query) const {
  return knn(query, 1).front();
}

std::vector<std::size_t> farthest_point_sample(std::span<const Vec3> points,
                                               std::size_t m,
                                               std::size_t start) {
  std::vector<std::size_t> all(points.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return farthest_point_sample_among(points, all, m, start);
}

std::vector<std::size_t> farthest_point_sample_among(
    std::span<const Vec3> points, std::span<const std::size_t> candidates,
    std::size_t m, std::size_t start) {
  if (m == 0 || m > candidates.size()) {
    throw InvalidArgument("farthest point sampling: m=" + std::to_string(m) +
                          " must be in [1, " +
                          std::to_string(candidates.size()) + "]");
  }
  if (start >= points.size()) {
    throw InvalidArgument("farthest point sampling: start index out of range");
  }
  // Work on candidates sorted by point index so scanning order is the
  // tie-break order.
  std::vector<std::size_t> cand(candidates.begin(), candidates.end());
  std::sort(cand.begin(), cand.end());
  if (std::adjacent_find(cand.begin(), cand.end()) != cand.end()) {
    throw InvalidArgument("farthest point sampling: duplicate candidates");
  }
  if (!std::binary_search(cand.begin(), cand.end(), start)) {
    throw InvalidArgument("farthest point sampling: start is not a candidate");
  }

  std::vector<double> min_d2(cand.size(), std::numeric_limits<double>::infinity());
  std::vector<char> taken(cand.size(), 0);
  std::vector<std::size_t> out;
  out.reserve(m);
  std::size_t current = start;
  for (std::size_t step = 0; step < m; ++step) {
    out.push_back(current);
    const Vec3& c = points[current];
    double best_d2 = -1.0;
    std::size_t best_slot = 0;
    for (std::size_t s = 0; s < cand.size(); ++s) {
      if (cand[s] == current) taken[s] = 1;
      if (taken[s]) continue;
      min_d2[s] = std::min(min_d2[s], squared_distance(points[cand[s]], c));
      if (min_d2[s] > best_d2) {
        best_d2 = min_d2[s];
        best_slot = s;
      }
    }
    if (step + 1 < m) current = cand[best_slot];
  }
  return out;
}

}  // namespace spa
