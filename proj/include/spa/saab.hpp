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

#include <Eigen/Core>

namespace spa {

/// Data-driven orthonormal transform: one constant DC kernel plus PCA (AC)
/// kernels of the DC-removed residual, ordered by decreasing energy.
///
/// Row 0 of `kernels` is the DC kernel (1/sqrt(d), ..., 1/sqrt(d)); rows
/// 1..d-1 are the AC kernels. A freshly fitted kernel holds all d rows, a
/// complete orthonormal basis of R^d; trained extractors may keep only the
/// leading rows they use. `energies[j]` is the training variance of output
/// channel j divided by the total, so the d energies sum to 1. Bias terms
/// are not used.
struct SaabKernel {
  Eigen::VectorXd mean;      // training sample mean, length d
  Eigen::MatrixXd kernels;   // c x d (c <= d), one kernel per row
  Eigen::VectorXd energies;  // length d

  std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t channel_count() const {
    return static_cast<std::size_t>(kernels.rows());
  }
};

/// Fits a kernel on `samples` (one sample per row). Needs at least d+1
/// samples. Each AC kernel is signed so that its largest-magnitude entry is
/// positive. A zero-variance input yields DC energy 1 and AC energies 0.
SaabKernel fit_saab(const Eigen::MatrixXd& samples);

/// First `keep` channel responses of x: kernels.row(j) . (x - mean).
Eigen::VectorXd apply_saab(const SaabKernel& kernel, const Eigen::VectorXd& x,
                           std::size_t keep);

}  // namespace spa
