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

#include "spa/registration.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/SVD>

#include "spa/error.hpp"
#include "spa/neighbor_index.hpp"
#include "spa/random.hpp"
#include "spa/saliency.hpp"

namespace spa {
namespace {

constexpr double kDegenerateSingular = 1e-12;

double pair_rmse(std::span<const Vec3> from, std::span<const Vec3> to,
                 const RigidTransform& t) {
  double sum = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) sum += (t(from[i]) - to[i]).squaredNorm();
  return std::sqrt(sum / static_cast<double>(from.size()));
}

}  // namespace

std::vector<std::size_t> nearest_feature_rows(const FeatureMatrix& target_features,
                                              const FeatureMatrix& source_features) {
  if (target_features.cols() != source_features.cols()) {
    throw InvalidArgument("feature widths differ: " +
                          std::to_string(target_features.cols()) + " vs " +
                          std::to_string(source_features.cols()));
  }
  if (source_features.rows() == 0) throw InvalidArgument("no source features to match");
  std::vector<std::size_t> out(static_cast<std::size_t>(target_features.rows()));
  for (Eigen::Index i = 0; i < target_features.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index best_j = 0;
    for (Eigen::Index j = 0; j < source_features.rows(); ++j) {
      const double d2 = (target_features.row(i) - source_features.row(j)).squaredNorm();
      if (d2 < best) {
        best = d2;
        best_j = j;
      }
    }
    out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best_j);
  }
  return out;
}

CorrespondenceSet match_correspondences(const PointCloud& target,
                                        const FeatureMatrix& target_features,
                                        std::span<const std::size_t> target_indices,
                                        const PointCloud& source,
                                        const FeatureMatrix& source_features,
                                        std::span<const std::size_t> source_indices) {
  auto gather = [](const FeatureMatrix& f, std::span<const std::size_t> idx,
                   std::size_t n, const char* side) {
    if (f.rows() != static_cast<Eigen::Index>(n)) {
      throw InvalidArgument(std::string(side) + " features do not match the cloud");
    }
    FeatureMatrix out(static_cast<Eigen::Index>(idx.size()), f.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] >= n) throw InvalidArgument(std::string(side) + " index out of range");
      out.row(static_cast<Eigen::Index>(i)) = f.row(static_cast<Eigen::Index>(idx[i]));
    }
    return out;
  };
  const FeatureMatrix t = gather(target_features, target_indices, target.size(), "target");
  const FeatureMatrix s = gather(source_features, source_indices, source.size(), "source");
  const auto nearest = nearest_feature_rows(t, s);

  CorrespondenceSet pairs;
  pairs.reserve(nearest.size());
  for (std::size_t i = 0; i < nearest.size(); ++i) {
    const std::size_t ti = target_indices[i];
    const std::size_t si = source_indices[nearest[i]];
    pairs.push_back({ti, si, target[ti], source[si]});
  }
  return pairs;
}

ProcrustesSolution solve_procrustes(std::span<const Vec3> from, std::span<const Vec3> to) {
  if (from.size() != to.size()) {
    throw InvalidArgument("procrustes: point lists differ in length");
  }
  if (from.size() < 3) {
    throw DegenerateGeometry("procrustes: need at least 3 pairs, got " +
                             std::to_string(from.size()));
  }
  const double inv_n = 1.0 / static_cast<double>(from.size());
  Vec3 mean_from = Vec3::Zero(), mean_to = Vec3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    mean_from += from[i];
    mean_to += to[i];
  }
  mean_from *= inv_n;
  mean_to *= inv_n;

  Mat3 cov = Mat3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    cov.noalias() += (from[i] - mean_from) * (to[i] - mean_to).transpose();
  }

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ProcrustesSolution sol;
  sol.singular_values = svd.singularValues();
  if (sol.singular_values(1) < kDegenerateSingular &&
      sol.singular_values(2) < kDegenerateSingular) {
    throw DegenerateGeometry("procrustes: correspondences are collinear or coincident");
  }
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  sol.raw_rotation = v * u.transpose();
  Mat3 d = Mat3::Identity();
  if (sol.raw_rotation.determinant() < 0.0) {
    d(2, 2) = -1.0;
    sol.reflection_corrected = true;
  }
  sol.transform.rotation = v * d * u.transpose();
  sol.transform.translation = mean_to - sol.transform.rotation * mean_from;
  return sol;
}

RigidTransform estimate_transform_svd(const CorrespondenceSet& pairs) {
  std::vector<Vec3> x, y;
  x.reserve(pairs.size());
  y.reserve(pairs.size());
  for (const Correspondence& c : pairs) {
    x.push_back(c.target_point);
    y.push_back(c.source_point);
  }
  return solve_procrustes(x, y).transform;
}

double residual_mse(const PointCloud& target, const PointCloud& source,
                    const RigidTransform& t) {
  if (target.size() != source.size()) {
    throw InvalidArgument("residual_mse: clouds have " + std::to_string(target.size()) +
                          " and " + std::to_string(source.size()) + " points");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    sum += (t(target[i]) - source[i]).squaredNorm();
  }
  return sum / static_cast<double>(target.size());
}

std::vector<std::size_t> select_points(const PointCloud& cloud, const SpaOptions& options) {
  switch (options.selection) {
    case SelectionStrategy::Salient: {
      const SaliencyField field = local_curvature_energies(cloud, options.saliency_k);
      return select_salient_points(cloud, field, options.salient_points,
                                   options.pool_fraction)
          .indices;
    }
    case SelectionStrategy::Farthest:
      return farthest_point_sample(cloud, options.salient_points, 0);
    case SelectionStrategy::Random: {
      if (options.salient_points == 0 || options.salient_points > cloud.size()) {
        throw InvalidArgument("random selection count out of range");
      }
      std::vector<std::size_t> idx(cloud.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      Rng rng(options.selection_seed);
      for (std::size_t i = 0; i < options.salient_points; ++i) {
        const std::size_t j = i + rng.below(idx.size() - i);
        std::swap(idx[i], idx[j]);
      }
      idx.resize(options.salient_points);
      return idx;
    }
  }
  throw InvalidArgument("unknown selection strategy");
}

RegistrationResult register_spa(const PointCloud& target, const PointCloud& source,
                                const FeatureExtractor& extractor,
                                const SpaOptions& options) {
  const FeatureMatrix target_features = extract_features(extractor, target);
  const std::vector<std::size_t> target_points = select_points(target, options);

  RegistrationResult result;
  PointCloud current = source;
  double previous_rmse = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < options.iterations; ++it) {
    const FeatureMatrix source_features = extract_features(extractor, current);
    std::vector<std::size_t> source_points;
    if (options.match_all_source) {
      source_points.resize(current.size());
      std::iota(source_points.begin(), source_points.end(), std::size_t{0});
    } else {
      source_points = select_points(current, options);
    }
    const CorrespondenceSet pairs =
        match_correspondences(target, target_features, target_points, current,
                              source_features, source_points);

    RigidTransform target_to_source;
    try {
      target_to_source = estimate_transform_svd(pairs);
    } catch (const DegenerateGeometry&) {
      result.degenerate = true;
      break;
    }
    const RigidTransform increment = invert(target_to_source);

    std::vector<Vec3> moved, fixed;
    moved.reserve(pairs.size());
    fixed.reserve(pairs.size());
    for (const Correspondence& c : pairs) {
      moved.push_back(c.source_point);
      fixed.push_back(c.target_point);
    }
    const double rmse = pair_rmse(moved, fixed, increment);
    if (rmse > previous_rmse * (1.0 + 1e-9) + 1e-12) result.residual_increased = true;
    previous_rmse = rmse;

    current = apply_transform(current, increment);
    result.transform = compose(increment, result.transform);
    result.per_iteration.push_back({increment, rmse});
    ++result.iterations_run;

    if (increment.rotation_angle_deg() < options.stop_rotation_deg &&
        increment.translation.norm() < options.stop_translation) {
      result.converged = true;
      break;
    }
  }
  return result;
}

RegistrationResult register_icp(const PointCloud& target, const PointCloud& source,
                                const IcpOptions& options) {
  const NeighborIndex index(target);
  RegistrationResult result;
  std::vector<Vec3> current(source.points().begin(), source.points().end());
  std::vector<Vec3> matched(current.size());
  double previous_rmse = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < options.iterations; ++it) {
    for (std::size_t i = 0; i < current.size(); ++i) {
      matched[i] = target[index.nearest(current[i])];
    }
    RigidTransform increment;
    try {
      increment = solve_procrustes(current, matched).transform;
    } catch (const DegenerateGeometry&) {
      result.degenerate = true;
      break;
    }
    const double rmse = pair_rmse(current, matched, increment);
    if (rmse > previous_rmse * (1.0 + 1e-9) + 1e-12) result.residual_increased = true;
    for (Vec3& p : current) p = increment(p);
    result.transform = compose(increment, result.transform);
    result.per_iteration.push_back({increment, rmse});
    ++result.iterations_run;
    if (std::abs(previous_rmse - rmse) < options.tolerance) {
      result.converged = true;
      break;
    }
    previous_rmse = rmse;
  }
  return result;
}

}  // namespace spa
