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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spa/geometry.hpp"
#include "spa/pointhop.hpp"
#include "spa/registration.hpp"
#include "spa/shapes.hpp"

namespace spa {

/// Random rigid motion: three Euler angles i.i.d. uniform on
/// [0, max_rotation_deg] and three translation components i.i.d. uniform on
/// [translation_low, translation_high].
struct TransformSpec {
  double max_rotation_deg = 45.0;
  double translation_low = -0.5;
  double translation_high = 0.5;
  std::uint64_t seed = 0;
};

struct SampledTransform {
  RigidTransform transform;
  EulerAngles angles;  // the sampled angles, which generate `transform`
};

/// Deterministic per seed. Draw order: rx, ry, rz, tx, ty, tz.
SampledTransform sample_transform(const TransformSpec& spec);

struct NoiseSpec {
  double variance = 0.01;
  std::uint64_t seed = 0;
};

/// Adds an independent N(0, variance) draw to every coordinate.
PointCloud add_noise(const PointCloud& cloud, const NoiseSpec& spec);

/// Ground-truth or estimated pose in metric space.
struct PoseSample {
  EulerAngles angles;
  Vec3 translation = Vec3::Zero();
};

/// Rotation errors are wrapped per-axis Euler differences in degrees, pooled
/// over samples x 3 axes; translation errors are pooled over samples x 3
/// components.
struct MetricsReport {
  double mse_r = 0.0, rmse_r = 0.0, mae_r = 0.0;
  double mse_t = 0.0, rmse_t = 0.0, mae_t = 0.0;
  std::vector<double> per_sample_mae_r;
  std::vector<double> per_sample_mae_t;
  std::size_t failed = 0;  // registrations excluded from the aggregates
};

MetricsReport compute_metrics(const std::vector<PoseSample>& ground_truth,
                              const std::vector<PoseSample>& estimates);

/// Median of a nonempty list (mean of the middle pair for even sizes).
double median(std::vector<double> values);

enum class Method { Spa, Icp, SpaRandom, SpaFps };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);

/// A registration problem before the random motion is applied. The source
/// shares the target's geometry but its point order is independent.
struct CloudPair {
  std::string label;
  PointCloud target;
  PointCloud source;
};

/// Pairs each cloud with a seeded random permutation of itself, or with an
/// identical copy when `permute` is false.
std::vector<CloudPair> make_pairs(const std::vector<NamedCloud>& clouds,
                                  std::uint64_t seed, bool permute = true);

struct SweepSettings {
  std::vector<Method> methods{Method::Spa};
  std::vector<double> max_angles_deg{45.0};
  double translation_low = -0.5;
  double translation_high = 0.5;
  double noise_variance = 0.0;  // applied to the moved source when > 0
  std::uint64_t seed = 0;
  SpaOptions spa;
  IcpOptions icp;
  std::size_t threads = 1;  // 0 = hardware concurrency
};

struct SweepRow {
  Method method = Method::Spa;
  double max_angle_deg = 0.0;
  MetricsReport report;
  // Dataset index of each entry of report.per_sample_mae_r / _t.
  std::vector<std::size_t> sample_index;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // angle-major, then method in settings order
  // ground_truth[a][i]: motion applied to pair i at angle a, shared by every
  // method.
  std::vector<std::vector<SampledTransform>> ground_truth;
};

/// Runs every method on every pair at every maximum angle. The motion and
/// noise of pair i at angle a depend only on (seed, angle value, i), so all
/// methods see identical inputs and results do not depend on scheduling.
/// `extractor` may be null when no SPA variant is requested.
SweepResult run_sweep(const std::vector<CloudPair>& dataset, const SweepSettings& settings,
                      const FeatureExtractor* extractor);

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;
  std::size_t count = 0;
};

struct Histogram {
  std::vector<HistogramBin> bins;  // contiguous from 0 up to the largest value
  double fraction_below_1deg = 0.0;
  double fraction_below_5deg = 0.0;
};

/// Bins [k w, (k+1) w) of nonnegative per-sample errors.
Histogram histogram(const std::vector<double>& per_sample_mae_r, double bin_width_deg);

}  // namespace spa
