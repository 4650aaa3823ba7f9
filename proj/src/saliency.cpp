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
#include <string>

#include <Eigen/Eigenvalues>

#include "spa/error.hpp"
#include "spa/neighbor_index.hpp"

namespace spa {

SaliencyField local_curvature_energies(const PointCloud& cloud, std::size_t k) {
  if (k < 3) {
    throw InvalidArgument("saliency neighborhood needs k >= 3, got " +
                          std::to_string(k));
  }
  if (k > cloud.size()) {
    throw InvalidArgument("saliency neighborhood k=" + std::to_string(k) +
                          " exceeds cloud size " + std::to_string(cloud.size()));
  }
  const NeighborIndex index(cloud);
  SaliencyField field;
  field.k_neighbors = k;
  field.lambda.resize(cloud.size());
  const double inv_k = 1.0 / static_cast<double>(k);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto nbrs = index.knn(cloud[i], k);
    Vec3 mean = Vec3::Zero();
    for (std::size_t j : nbrs) mean += cloud[j];
    mean *= inv_k;
    Mat3 cov = Mat3::Zero();
    for (std::size_t j : nbrs) {
      const Vec3 d = cloud[j] - mean;
      cov.noalias() += d * d.transpose();
    }
    cov *= inv_k;
    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov, Eigen::EigenvaluesOnly);
    field.lambda[i] = std::max(0.0, eig.eigenvalues()(0));
  }
  return field;
}

std::size_t argmax_lambda(const SaliencyField& field) {
  if (field.lambda.empty()) throw InvalidArgument("empty saliency field");
  // max_element returns the first maximum, i.e. the lowest index.
  return static_cast<std::size_t>(
      std::max_element(field.lambda.begin(), field.lambda.end()) -
      field.lambda.begin());
}

std::vector<std::size_t> salient_candidate_pool(const SaliencyField& field,
                                                double pool_fraction) {
  if (!(pool_fraction > 0.0 && pool_fraction <= 1.0)) {
    throw InvalidArgument("pool_fraction must lie in (0, 1]");
  }
  const std::size_t n = field.lambda.size();
  const auto pool_size = std::min(
      n, static_cast<std::size_t>(std::ceil(pool_fraction * static_cast<double>(n))));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return field.lambda[a] > field.lambda[b];
  });
  order.resize(pool_size);
  return order;
}

SalientSet select_salient_points(const PointCloud& cloud,
                                 const SaliencyField& field, std::size_t m,
                                 double pool_fraction) {
  if (field.lambda.size() != cloud.size()) {
    throw InvalidArgument("saliency field does not match the cloud size");
  }
  if (m == 0 || m > cloud.size()) {
    throw InvalidArgument("salient point count m=" + std::to_string(m) +
                          " must be in [1, " + std::to_string(cloud.size()) + "]");
  }
  const auto pool = salient_candidate_pool(field, pool_fraction);
  if (pool.size() < m) {
    throw InvalidArgument("salient candidate pool holds " +
                          std::to_string(pool.size()) + " points (pool_fraction " +
                          std::to_string(pool_fraction) + " of " +
                          std::to_string(cloud.size()) + "), fewer than m=" +
                          std::to_string(m));
  }
  SalientSet out;
  out.indices = farthest_point_sample_among(cloud.points(), pool, m,
                                            argmax_lambda(field));
  out.lambdas.reserve(m);
  for (std::size_t i : out.indices) out.lambdas.push_back(field.lambda[i]);
  return out;
}

}  // namespace spa
