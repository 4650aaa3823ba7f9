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

#include "spa/saab.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "spa/error.hpp"
#include "spa/random.hpp"
#include "support/oracles.hpp"

namespace spa {
namespace {

Eigen::MatrixXd correlated_samples(Rng& rng, Eigen::Index n, Eigen::Index d) {
  Eigen::MatrixXd mix(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) mix(i, j) = rng.gaussian();
  }
  Eigen::MatrixXd s(n, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    Eigen::VectorXd z(d);
    for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.gaussian() * (1.0 + j);
    s.row(r) = (mix * z).transpose();
    s.row(r).array() += 3.0;
  }
  return s;
}

TEST(SaabTest, ConstantSamplesPutAllEnergyInDc) {
  const Eigen::MatrixXd s = Eigen::MatrixXd::Constant(10, 4, 2.5);
  const SaabKernel k = fit_saab(s);
  EXPECT_EQ(k.energies(0), 1.0);
  for (Eigen::Index j = 1; j < 4; ++j) EXPECT_EQ(k.energies(j), 0.0);
  EXPECT_TRUE(k.mean.isApprox(Eigen::VectorXd::Constant(4, 2.5)));
}

TEST(SaabTest, KernelsAreOrthonormalWithDcFirst) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.below(23));
    const SaabKernel k = fit_saab(correlated_samples(rng, 3 * d, d));
    ASSERT_EQ(k.channel_count(), static_cast<std::size_t>(d));
    const Eigen::MatrixXd gram = k.kernels * k.kernels.transpose();
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((k.kernels.row(0).array() - 1.0 / std::sqrt(double(d))).abs().maxCoeff(), 1e-15);
    EXPECT_NEAR(k.energies.sum(), 1.0, 1e-9);
    for (Eigen::Index j = 2; j < d; ++j) EXPECT_LE(k.energies(j), k.energies(j - 1));
    for (Eigen::Index j = 1; j < d; ++j) {
      Eigen::Index arg = 0;
      k.kernels.row(j).cwiseAbs().maxCoeff(&arg);
      EXPECT_GT(k.kernels(j, arg), 0.0);
    }
  }
}

TEST(SaabTest, AcEnergiesMatchIndependentEigensolver) {
  Rng rng(2);
  const Eigen::Index d = 8, n = 200;
  const Eigen::MatrixXd s = correlated_samples(rng, n, d);
  const SaabKernel k = fit_saab(s);

  const Eigen::MatrixXd centered = s.rowwise() - s.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / double(n);
  const Eigen::MatrixXd p =
      Eigen::MatrixXd::Identity(d, d) - Eigen::MatrixXd::Constant(d, d, 1.0 / double(d));
  const auto eig = testing::jacobi_eigen(p * cov * p);
  const Eigen::VectorXd dc = Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(double(d)));
  const double total = cov.trace();
  EXPECT_NEAR(k.energies(0), dc.dot(cov * dc) / total, 1e-12);
  for (Eigen::Index j = 1; j < d; ++j) {
    // The projected covariance has one zero eigenvalue along DC; the AC
    // channels take the rest in descending order.
    EXPECT_NEAR(k.energies(j), eig.values(d - j) / total, 1e-12);
    const Eigen::VectorXd v = eig.vectors.col(d - j);
    EXPECT_NEAR(std::abs(v.dot(k.kernels.row(j).transpose())), 1.0, 1e-8);
  }
}

TEST(SaabTest, LeadingAcKernelFollowsTheDominantDirection) {
  Rng rng(3);
  Eigen::VectorXd dir(4);
  dir << 1, -1, 2, -2;  // orthogonal to DC
  dir.normalize();
  Eigen::MatrixXd s(300, 4);
  for (Eigen::Index r = 0; r < 300; ++r) {
    Eigen::VectorXd x = dir * (5.0 * rng.gaussian());
    for (Eigen::Index j = 0; j < 4; ++j) x(j) += 0.01 * rng.gaussian();
    s.row(r) = x.transpose();
  }
  const SaabKernel k = fit_saab(s);
  EXPECT_NEAR(std::abs(k.kernels.row(1).dot(dir.transpose())), 1.0, 1e-5);
}

TEST(SaabTest, TrainingResponsesCarryTheStatedEnergies) {
  Rng rng(4);
  const Eigen::MatrixXd s = correlated_samples(rng, 150, 6);
  const SaabKernel k = fit_saab(s);
  Eigen::VectorXd var = Eigen::VectorXd::Zero(6);
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    var += apply_saab(k, s.row(r).transpose(), 6).array().square().matrix();
  }
  var /= var.sum();
  EXPECT_LT((var - k.energies).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SaabTest, ApplyIsAnIsometryAndReconstructs) {
  Rng rng(5);
  const SaabKernel k = fit_saab(correlated_samples(rng, 60, 24));
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(24);
    for (Eigen::Index j = 0; j < 24; ++j) x(j) = rng.uniform(-10, 10);
    const Eigen::VectorXd y = apply_saab(k, x, 24);
    EXPECT_NEAR(y.squaredNorm(), (x - k.mean).squaredNorm(), 1e-9 * (1 + y.squaredNorm()));
    EXPECT_LT((k.kernels.transpose() * y + k.mean - x).cwiseAbs().maxCoeff(), 1e-9);
    const Eigen::VectorXd two = apply_saab(k, x, 2);
    ASSERT_EQ(two.size(), 2);
    for (Eigen::Index j = 0; j < 2; ++j) {
      double dot = 0.0;
      for (Eigen::Index i = 0; i < 24; ++i) dot += k.kernels(j, i) * (x(i) - k.mean(i));
      EXPECT_NEAR(two(j), dot, 1e-12);
    }
  }
  EXPECT_LT(apply_saab(k, k.mean, 24).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SaabTest, RejectsBadInput) {
  EXPECT_THROW(fit_saab(Eigen::MatrixXd::Zero(4, 4)), InvalidArgument);
  const SaabKernel k = fit_saab(Eigen::MatrixXd::Random(10, 3));
  EXPECT_THROW(apply_saab(k, Eigen::VectorXd::Zero(4), 1), InvalidArgument);
  EXPECT_THROW(apply_saab(k, Eigen::VectorXd::Zero(3), 4), InvalidArgument);
}

}  // namespace
}  // namespace spa
