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

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "spa/geometry.hpp"
#include "spa/saab.hpp"

namespace spa {

inline constexpr std::size_t kHopCount = 4;

/// Tunables of the four-hop feature extractor.
struct HopConfig {
  std::array<std::size_t, kHopCount> neighbors_per_hop{32, 8, 8, 8};
  double energy_threshold = 1e-4;
  // Working-set size of each hop; farthest point sampling reduces the
  // previous hop's points to this many before pooling.
  std::array<std::size_t, kHopCount> points_per_hop{1024, 768, 512, 384};

  /// Throws InvalidArgument when an invariant is broken.
  void validate() const;

  friend bool operator==(const HopConfig&, const HopConfig&) = default;
};

/// A channel emitted by a hop. `kernel` selects the Saab kernel of that hop,
/// `channel` the output row of the kernel, and `energy` is the cumulative
/// energy (local energy times the energies of every ancestor channel).
struct RetainedChannel {
  std::uint32_t kernel = 0;
  std::uint32_t channel = 0;
  double energy = 0.0;

  friend bool operator==(const RetainedChannel&, const RetainedChannel&) = default;
};

/// Hop 1 holds a single kernel over the 24-dim pooled coordinate vector.
/// Hops 2-4 are channel-wise: kernel i pools retained channel i of the
/// previous hop into an 8-vector and transforms it independently.
struct HopModel {
  std::vector<SaabKernel> kernels;
  std::vector<RetainedChannel> retained;
};

/// Per-point features, one row per point of the cloud they were computed on.
using FeatureMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class FeatureExtractor {
 public:
  FeatureExtractor(HopConfig config, std::array<HopModel, kHopCount> hops);

  const HopConfig& config() const { return config_; }
  const std::array<HopModel, kHopCount>& hops() const { return hops_; }
  /// Total width of a feature row: sum of retained channels over all hops.
  std::size_t feature_dim() const { return feature_dim_; }

 private:
  HopConfig config_;
  std::array<HopModel, kHopCount> hops_;
  std::size_t feature_dim_ = 0;
};

/// Octant index of a relative coordinate: bit 2 for x < 0, bit 1 for y < 0,
/// bit 0 for z < 0. Zero counts as positive, so (+,+,+) is 0 and (-,-,-) is 7.
int octant_of(const Vec3& relative);

/// Groups the k nearest neighbors of `center` (the center included) by the
/// sign octant of neighbor - center and returns the 8 per-octant means of
/// their attribute rows, concatenated in octant order. Empty octants give
/// zeros. `attributes` has one row per cloud point.
Eigen::VectorXd octant_pool(const PointCloud& cloud,
                            const Eigen::MatrixXd& attributes,
                            std::size_t center, std::size_t k);

/// Unsupervised single-pass training on a list of clouds. Deterministic for a
/// given input order.
FeatureExtractor train_feature_extractor(const std::vector<PointCloud>& clouds,
                                         const HopConfig& config = {});

/// Features for every point of `cloud`. Each hop's responses are computed on
/// that hop's sampled working set and copied to each cloud point from its
/// nearest working-set point. Clouds smaller than the configured hop sizes
/// use all available points.
FeatureMatrix extract_features(const FeatureExtractor& extractor,
                               const PointCloud& cloud);

}  // namespace spa
