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

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "spa/error.hpp"

namespace spa {
namespace {

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0.0) v = -v;
}

}  // namespace

SaabKernel fit_saab(const Eigen::MatrixXd& samples) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index d = samples.cols();
  if (d < 1) throw InvalidArgument("saab: samples have zero dimension");
  if (n < d + 1) {
    throw InvalidArgument("saab: need at least " + std::to_string(d + 1) +
                          " samples for dimension " + std::to_string(d) +
                          ", got " + std::to_string(n));
  }
  if (!samples.allFinite()) throw InvalidArgument("saab: non-finite sample");

  SaabKernel k;
  k.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - k.mean.transpose();
  const Eigen::VectorXd dc =
      Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));

  // Orthonormal basis of the complement of the DC direction: the trailing
  // d-1 columns of the Householder Q of dc.
  Eigen::MatrixXd basis(d, d - 1);
  if (d > 1) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(dc);
    const Eigen::MatrixXd q = qr.householderQ();
    basis = q.rightCols(d - 1);
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::VectorXd dc_response = centered * dc;
  const double dc_energy = dc_response.squaredNorm() * inv_n;

  Eigen::VectorXd ac_energy = Eigen::VectorXd::Zero(d - 1);
  Eigen::MatrixXd ac = basis;
  if (d > 1) {
    const Eigen::MatrixXd reduced = centered * basis;  // n x (d-1)
    const Eigen::MatrixXd cov = (reduced.transpose() * reduced) * inv_n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
      throw DegenerateGeometry("saab: covariance eigendecomposition failed");
    }
    // Eigen returns ascending eigenvalues; flip to descending.
    for (Eigen::Index j = 0; j < d - 1; ++j) {
      const Eigen::Index src = d - 2 - j;
      ac_energy(j) = std::max(0.0, eig.eigenvalues()(src));
      ac.col(j) = basis * eig.eigenvectors().col(src);
      fix_sign(ac.col(j));
    }
  }

  k.kernels.resize(d, d);
  k.kernels.row(0) = dc.transpose();
  if (d > 1) k.kernels.bottomRows(d - 1) = ac.transpose();

  k.energies.resize(d);
  k.energies(0) = dc_energy;
  k.energies.tail(d - 1) = ac_energy;
  const double total = k.energies.sum();
  if (total > 0.0) {
    k.energies /= total;
  } else {
    k.energies.setZero();
    k.energies(0) = 1.0;
  }
  return k;
}

Eigen::VectorXd apply_saab(const SaabKernel& kernel, const Eigen::VectorXd& x,
                           std::size_t keep) {
  if (x.size() != kernel.mean.size()) {
    throw InvalidArgument("saab: input has dimension " + std::to_string(x.size()) +
                          ", kernel expects " +
                          std::to_string(kernel.mean.size()));
  }
  if (keep > kernel.channel_count()) {
    throw InvalidArgument("saab: keep=" + std::to_string(keep) + " exceeds " +
                          std::to_string(kernel.channel_count()) + " channels");
  }
  return kernel.kernels.topRows(static_cast<Eigen::Index>(keep)) * (x - kernel.mean);
}

}  // namespace spa
