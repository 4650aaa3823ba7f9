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

#include "spa/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "gtest/gtest.h"
#include "spa/error.hpp"
#include "support/oracles.hpp"

namespace spa {
namespace {

std::vector<PoseSample> random_poses(Rng& rng, std::size_t n) {
  std::vector<PoseSample> out(n);
  for (PoseSample& p : out) {
    p.angles = {rng.uniform(-180, 180), rng.uniform(-90, 90), rng.uniform(-180, 180)};
    p.translation = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  }
  return out;
}

TEST(SampleTransformTest, DeterministicAndInRange) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const TransformSpec spec{30.0, -0.5, 0.5, seed};
    const SampledTransform a = sample_transform(spec);
    const SampledTransform b = sample_transform(spec);
    EXPECT_EQ(a.transform.rotation, b.transform.rotation);
    EXPECT_EQ(a.transform.translation, b.transform.translation);
    for (double v : {a.angles.rx, a.angles.ry, a.angles.rz}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LT(v, 30.0);
    }
    EXPECT_TRUE((a.transform.translation.array() >= -0.5).all());
    EXPECT_TRUE((a.transform.translation.array() < 0.5).all());
    EXPECT_LT((euler_to_rotation(a.angles) - a.transform.rotation).norm(), 1e-15);
  }
}

TEST(SampleTransformTest, DegenerateRangesAndErrors) {
  const SampledTransform z = sample_transform({0.0, 0.0, 0.0, 4});
  EXPECT_EQ(z.transform.rotation, Mat3::Identity());
  EXPECT_EQ(z.transform.translation, Vec3::Zero());
  EXPECT_THROW(sample_transform({-1.0, 0, 0, 0}), InvalidArgument);
  EXPECT_THROW(sample_transform({180.0, 0, 0, 0}), InvalidArgument);
  EXPECT_THROW(sample_transform({10.0, 0.5, -0.5, 0}), InvalidArgument);
}

TEST(NoiseTest, MomentsAndDeterminism) {
  const PointCloud cloud(std::vector<Vec3>(20000, Vec3(1, 2, 3)));
  const PointCloud noisy = add_noise(cloud, {0.01, 7});
  EXPECT_EQ(noisy, add_noise(cloud, {0.01, 7}));
  Vec3 mean = Vec3::Zero();
  double var = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i) mean += noisy[i] - cloud[i];
  mean /= double(noisy.size());
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    var += (noisy[i] - cloud[i] - mean).squaredNorm();
  }
  var /= 3.0 * double(noisy.size());
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 0.003);
  EXPECT_NEAR(var, 0.01, 0.0005);
  EXPECT_EQ(add_noise(cloud, {0.0, 1}), cloud);
  EXPECT_THROW(add_noise(cloud, {-1.0, 1}), InvalidArgument);
}

TEST(MetricsTest, PerfectEstimatesGiveZeros) {
  Rng rng(1);
  const auto truth = random_poses(rng, 50);
  const MetricsReport m = compute_metrics(truth, truth);
  EXPECT_EQ(m.mse_r, 0.0);
  EXPECT_EQ(m.rmse_r, 0.0);
  EXPECT_EQ(m.mae_r, 0.0);
  EXPECT_EQ(m.mse_t, 0.0);
  EXPECT_EQ(m.rmse_t, 0.0);
  EXPECT_EQ(m.mae_t, 0.0);
}

TEST(MetricsTest, RmseSquaredIsMse) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + rng.below(40);
    const MetricsReport m = compute_metrics(random_poses(rng, n), random_poses(rng, n));
    EXPECT_NEAR(m.rmse_r * m.rmse_r, m.mse_r, 1e-9 * std::max(1.0, m.mse_r));
    EXPECT_NEAR(m.rmse_t * m.rmse_t, m.mse_t, 1e-9);
    EXPECT_LE(m.mae_r, m.rmse_r + 1e-12);
    EXPECT_EQ(m.per_sample_mae_r.size(), n);
  }
}

TEST(MetricsTest, ConstantTenDegreeError) {
  std::vector<PoseSample> truth(7), est(7);
  for (PoseSample& p : est) p.angles = {10.0, 10.0, 10.0};
  const MetricsReport m = compute_metrics(truth, est);
  EXPECT_EQ(m.mse_r, 100.0);
  EXPECT_EQ(m.rmse_r, 10.0);
  EXPECT_EQ(m.mae_r, 10.0);
}

TEST(MetricsTest, AngleErrorsWrap) {
  std::vector<PoseSample> truth(1), est(1);
  truth[0].angles = {179.0, 0.0, -179.0};
  est[0].angles = {-179.0, 0.0, 179.0};
  EXPECT_NEAR(compute_metrics(truth, est).mae_r, 4.0 / 3.0, 1e-12);
  EXPECT_THROW(compute_metrics(truth, {}), InvalidArgument);
  EXPECT_THROW(compute_metrics({}, {}), InvalidArgument);
}

TEST(MedianTest, OddEvenAndEmpty) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_THROW(median({}), InvalidArgument);
}

TEST(HistogramTest, MatchesBinScanOracle) {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    Rng rng(seed);
    std::vector<double> values(1 + rng.below(256));
    for (double& v : values) v = std::abs(rng.gaussian()) * 8.0;
    const double width = seed % 2 ? 1.0 : rng.uniform(0.25, 3.0);
    const Histogram h = histogram(values, width);
    const auto oracle = testing::brute_histogram(values, width);
    ASSERT_EQ(h.bins.size(), oracle.size()) << "seed " << seed;
    std::size_t total = 0;
    for (std::size_t b = 0; b < oracle.size(); ++b) {
      EXPECT_EQ(h.bins[b].count, oracle[b]);
      EXPECT_DOUBLE_EQ(h.bins[b].low, double(b) * width);
      total += h.bins[b].count;
    }
    EXPECT_EQ(total, values.size());
    const auto below = [&](double t) {
      return double(std::count_if(values.begin(), values.end(), [&](double v) { return v < t; })) /
             double(values.size());
    };
    EXPECT_EQ(h.fraction_below_1deg, below(1.0));
    EXPECT_EQ(h.fraction_below_5deg, below(5.0));
  }
  EXPECT_THROW(histogram({}, 1.0), InvalidArgument);
  EXPECT_THROW(histogram({1.0}, 0.0), InvalidArgument);
  EXPECT_THROW(histogram({-1.0}, 1.0), InvalidArgument);
}

TEST(MethodTest, NamesRoundTrip) {
  for (Method m : {Method::Spa, Method::Icp, Method::SpaRandom, Method::SpaFps}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_FALSE(parse_method("dcp").has_value());
}

TEST(MakePairsTest, SourceIsASeededPermutation) {
  const auto suite = synthetic_suite(128, 1);
  const auto pairs = make_pairs(suite, 5);
  ASSERT_EQ(pairs.size(), suite.size());
  const auto again = make_pairs(suite, 5);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(pairs[i].target, suite[i].cloud);
    EXPECT_EQ(pairs[i].source, again[i].source);
    EXPECT_FALSE(pairs[i].source == pairs[i].target);
    EXPECT_EQ(make_pairs(suite, 5, false)[i].source, suite[i].cloud);
    auto key = [](const Vec3& a, const Vec3& b) {
      return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
    };
    std::vector<Vec3> a(pairs[i].target.points().begin(), pairs[i].target.points().end());
    std::vector<Vec3> b(pairs[i].source.points().begin(), pairs[i].source.points().end());
    std::sort(a.begin(), a.end(), key);
    std::sort(b.begin(), b.end(), key);
    EXPECT_EQ(a, b);
  }
}

TEST(RunSweepTest, IdentitySweepAndSchedulingIndependence) {
  const auto suite = synthetic_suite(256, 2);
  const std::vector<NamedCloud> clouds(suite.begin(), suite.begin() + 4);
  HopConfig hc;
  hc.points_per_hop = {256, 192, 128, 96};
  std::vector<PointCloud> train;
  for (const NamedCloud& c : synthetic_suite(256, 1)) train.push_back(c.cloud);
  const FeatureExtractor e = train_feature_extractor(train, hc);

  SweepSettings s;
  s.methods = {Method::Spa, Method::Icp, Method::SpaRandom, Method::SpaFps};
  s.max_angles_deg = {0.0, 30.0};
  s.translation_low = s.translation_high = 0.0;
  s.spa.iterations = 3;
  s.threads = 1;
  const auto pairs = make_pairs(clouds, 3, false);
  const SweepResult one = run_sweep(pairs, s, &e);
  s.threads = 3;
  const SweepResult three = run_sweep(pairs, s, &e);
  ASSERT_EQ(one.rows.size(), 8u);
  for (std::size_t r = 0; r < one.rows.size(); ++r) {
    EXPECT_EQ(one.rows[r].report.per_sample_mae_r, three.rows[r].report.per_sample_mae_r);
    EXPECT_EQ(one.rows[r].report.mae_t, three.rows[r].report.mae_t);
  }
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_EQ(one.rows[r].max_angle_deg, 0.0);
    EXPECT_LT(one.rows[r].report.mae_r, 0.1) << to_string(one.rows[r].method);
    EXPECT_EQ(one.rows[r].report.failed, 0u);
  }
  ASSERT_EQ(one.ground_truth.size(), 2u);
  EXPECT_EQ(one.ground_truth[1].size(), 4u);

  // Shuffled sources keep ICP exact at zero motion.
  s.methods = {Method::Icp};
  s.max_angles_deg = {0.0};
  EXPECT_LT(run_sweep(make_pairs(clouds, 3), s, nullptr).rows[0].report.mae_r, 1e-6);

  s.methods = {Method::Spa};
  EXPECT_THROW(run_sweep(pairs, s, nullptr), InvalidArgument);
  s.methods = {Method::Icp};
  EXPECT_NO_THROW(run_sweep(pairs, s, nullptr));
}

}  // namespace
}  // namespace spa
