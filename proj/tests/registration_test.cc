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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gtest/gtest.h"
#include "spa/error.hpp"
#include "spa/evaluation.hpp"
#include "spa/shapes.hpp"
#include "support/oracles.hpp"

namespace spa {
namespace {

using testing::random_rotation;

HopConfig small_config() {
  HopConfig c;
  c.points_per_hop = {512, 384, 256, 192};
  return c;
}

const FeatureExtractor& extractor() {
  static const FeatureExtractor e = [] {
    std::vector<PointCloud> clouds;
    for (const NamedCloud& c : synthetic_suite(512, 1)) clouds.push_back(c.cloud);
    return train_feature_extractor(clouds, small_config());
  }();
  return e;
}

TEST(ProcrustesTest, RecoversExactMotion) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.below(30);
    const auto from = testing::random_points(rng, n);
    const RigidTransform t(random_rotation(rng), Vec3(rng.uniform(-5, 5), rng.uniform(-5, 5), 0));
    std::vector<Vec3> to;
    for (const Vec3& p : from) to.push_back(t(p));
    const ProcrustesSolution s = solve_procrustes(from, to);
    EXPECT_LT((s.transform.rotation - t.rotation).norm(), 1e-9);
    EXPECT_LT((s.transform.translation - t.translation).norm(), 1e-9);
    // Three points are coplanar, so the mirror fit is as good and may need
    // the correction.
    if (n > 3) EXPECT_FALSE(s.reflection_corrected);
    EXPECT_GE(s.singular_values[0], s.singular_values[1]);
    EXPECT_GE(s.singular_values[1], s.singular_values[2]);
  }
}

TEST(ProcrustesTest, PlanarSetsStayProper) {
  // A coplanar set and its mirror image: the unconstrained optimum is a
  // reflection, which must be replaced by the best proper rotation.
  const std::vector<Vec3> from{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 2, 0), Vec3(1, 1, 0)};
  std::vector<Vec3> to;
  for (const Vec3& p : from) to.emplace_back(p.x(), -p.y(), p.z());
  const ProcrustesSolution s = solve_procrustes(from, to);
  EXPECT_NEAR(s.transform.rotation.determinant(), 1.0, 1e-9);
  EXPECT_TRUE(is_rotation(s.transform.rotation));
}

TEST(ProcrustesTest, RejectsDegenerateInput) {
  const std::vector<Vec3> two{Vec3::Zero(), Vec3::UnitX()};
  EXPECT_THROW(solve_procrustes(two, two), DegenerateGeometry);
  const std::vector<Vec3> line{Vec3::Zero(), Vec3::UnitX(), 2 * Vec3::UnitX(), 3 * Vec3::UnitX()};
  EXPECT_THROW(solve_procrustes(line, line), DegenerateGeometry);
  const std::vector<Vec3> three{Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY()};
  EXPECT_THROW(solve_procrustes(three, two), InvalidArgument);
}

TEST(EstimateTransformTest, MapsTargetOntoSource) {
  Rng rng(2);
  const RigidTransform t(random_rotation(rng), Vec3(0.3, -0.2, 0.1));
  CorrespondenceSet pairs;
  for (const Vec3& p : testing::random_points(rng, 10)) {
    pairs.push_back({0, 0, p, t(p)});
  }
  const RigidTransform est = estimate_transform_svd(pairs);
  EXPECT_LT((est.rotation - t.rotation).norm(), 1e-9);
  EXPECT_LT((est.translation - t.translation).norm(), 1e-9);
}

TEST(MatchTest, NearestRowsMatchBruteForce) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const Eigen::Index rows_t = 1 + static_cast<Eigen::Index>(rng.below(64));
    const Eigen::Index rows_s = 1 + static_cast<Eigen::Index>(rng.below(64));
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.below(40));
    FeatureMatrix ft(rows_t, d), fs(rows_s, d);
    // Coarse values create exact distance ties.
    for (Eigen::Index i = 0; i < ft.size(); ++i) ft.data()[i] = double(rng.below(3));
    for (Eigen::Index i = 0; i < fs.size(); ++i) fs.data()[i] = double(rng.below(3));
    ASSERT_EQ(nearest_feature_rows(ft, fs), testing::brute_match(ft, fs)) << "seed " << seed;
  }
}

TEST(MatchTest, CorrespondencesCarryIndicesAndPoints) {
  Rng rng(3);
  const PointCloud target(testing::random_points(rng, 20));
  const PointCloud source(testing::random_points(rng, 30));
  FeatureMatrix ft = FeatureMatrix::Random(20, 5), fs = FeatureMatrix::Random(30, 5);
  const std::vector<std::size_t> ti{3, 7, 11}, si{0, 5, 9, 29};
  const CorrespondenceSet pairs = match_correspondences(target, ft, ti, source, fs, si);
  ASSERT_EQ(pairs.size(), 3u);
  Eigen::MatrixXd sub_t(3, 5), sub_s(4, 5);
  for (int i = 0; i < 3; ++i) sub_t.row(i) = ft.row(static_cast<Eigen::Index>(ti[i]));
  for (int i = 0; i < 4; ++i) sub_s.row(i) = fs.row(static_cast<Eigen::Index>(si[i]));
  const auto oracle = testing::brute_match(sub_t, sub_s);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(pairs[i].target_index, ti[i]);
    EXPECT_EQ(pairs[i].source_index, si[oracle[i]]);
    EXPECT_EQ(pairs[i].target_point, target[ti[i]]);
    EXPECT_EQ(pairs[i].source_point, source[si[oracle[i]]]);
  }
}

TEST(ResidualTest, ZeroForTheTrueMotion) {
  Rng rng(4);
  const PointCloud target(testing::random_points(rng, 50));
  const RigidTransform t(random_rotation(rng), Vec3(1, 2, 3));
  const PointCloud source = apply_transform(target, t);
  EXPECT_LT(residual_mse(target, source, t), 1e-20);
  EXPECT_NEAR(residual_mse(target, target, RigidTransform(Mat3::Identity(), Vec3(0, 0, 2))), 4.0,
              1e-12);
}

TEST(SelectPointsTest, StrategiesReturnDistinctIndices) {
  const PointCloud cloud = generate_shape(ShapeKind::LBracket, 512, 6);
  for (SelectionStrategy s :
       {SelectionStrategy::Salient, SelectionStrategy::Farthest, SelectionStrategy::Random}) {
    SpaOptions opt;
    opt.selection = s;
    auto idx = select_points(cloud, opt);
    ASSERT_EQ(idx.size(), 32u);
    std::sort(idx.begin(), idx.end());
    EXPECT_EQ(std::adjacent_find(idx.begin(), idx.end()), idx.end());
  }
  SpaOptions opt;
  opt.selection = SelectionStrategy::Random;
  const auto first = select_points(cloud, opt);
  EXPECT_EQ(select_points(apply_transform(cloud, RigidTransform(euler_to_rotation({1, 2, 3}),
                                                                Vec3(1, 0, 0))),
                          opt),
            first);
  opt.selection_seed = 1;
  EXPECT_NE(select_points(cloud, opt), first);
}

TEST(RegisterSpaTest, SelfRegistrationIsIdentity) {
  const PointCloud cloud = generate_shape(ShapeKind::SteppedBlock, 512, 8, 0.3);
  const RegistrationResult r = register_spa(cloud, cloud, extractor());
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations_run, 1u);
  EXPECT_LT(r.transform.rotation_angle_deg(), 1e-9);
  EXPECT_LT(r.transform.translation.norm(), 1e-12);
}

TEST(RegisterSpaTest, RecoversPureTranslation) {
  Rng rng(9);
  for (const NamedCloud& c : synthetic_suite(512, 3)) {
    const Vec3 shift(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
    const PointCloud source = apply_transform(c.cloud, RigidTransform(Mat3::Identity(), shift));
    const RegistrationResult r = register_spa(c.cloud, source, extractor());
    EXPECT_FALSE(r.degenerate);
    EXPECT_LT((r.transform.translation + shift).cwiseAbs().maxCoeff(), 1e-3) << c.name;
    EXPECT_LT(r.transform.rotation_angle_deg(), 1e-3) << c.name;
  }
}

TEST(RegisterSpaTest, TwentyDegreeRotationsConverge) {
  const auto suite = synthetic_suite(512, 2);
  std::vector<double> errors;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const PointCloud& shape = suite[seed % suite.size()].cloud;
    Vec3 axis(rng.gaussian(), rng.gaussian(), rng.gaussian());
    const Mat3 rot = Eigen::AngleAxisd(20.0 * std::numbers::pi / 180.0, axis.normalized())
                         .toRotationMatrix();
    const RigidTransform g(rot, Vec3::Zero());
    const RegistrationResult r = register_spa(shape, apply_transform(shape, g), extractor());
    const EulerAngles truth = rotation_to_euler(g.rotation).angles;
    const EulerAngles est = rotation_to_euler(invert(r.transform).rotation).angles;
    errors.push_back((std::abs(wrap_degrees(truth.rx - est.rx)) +
                      std::abs(wrap_degrees(truth.ry - est.ry)) +
                      std::abs(wrap_degrees(truth.rz - est.rz))) / 3.0);
  }
  EXPECT_LT(median(errors), 2.0);
}

TEST(RegisterSpaTest, MatchAllSourceRuns) {
  const PointCloud cloud = generate_shape(ShapeKind::NotchedCylinder, 512, 4);
  SpaOptions opt;
  opt.match_all_source = true;
  const RegistrationResult r = register_spa(cloud, cloud, extractor(), opt);
  EXPECT_LT(r.transform.rotation_angle_deg(), 1e-9);
}

TEST(RegisterIcpTest, RecoversSmallMotion) {
  const PointCloud target = generate_shape(ShapeKind::LBracket, 512, 10);
  const RigidTransform g(euler_to_rotation({5, -4, 3}), Vec3(0.02, -0.01, 0.03));
  const RegistrationResult r = register_icp(target, apply_transform(target, g));
  const RigidTransform back = compose(r.transform, g);
  EXPECT_LT(back.rotation_angle_deg(), 1e-6);
  EXPECT_LT(back.translation.norm(), 1e-6);
  EXPECT_GE(r.iterations_run, 1u);
  EXPECT_EQ(r.per_iteration.size(), r.iterations_run);
}

TEST(RegisterIcpTest, RespectsTheIterationCap) {
  const PointCloud target = generate_shape(ShapeKind::Cube, 256, 1);
  const RigidTransform g(euler_to_rotation({30, 0, 0}), Vec3(0.3, 0, 0));
  IcpOptions opt;
  opt.iterations = 1;
  EXPECT_EQ(register_icp(target, apply_transform(target, g), opt).iterations_run, 1u);
}

}  // namespace
}  // namespace spa
