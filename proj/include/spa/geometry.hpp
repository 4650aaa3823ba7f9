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
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace spa {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Ordered, non-empty set of finite 3D points. Index i always names the same
/// point, so downstream index sets (neighbors, salient points, matches) stay
/// meaningful for the lifetime of the cloud.
class PointCloud {
 public:
  /// Throws InvalidArgument on an empty list or a non-finite coordinate.
  explicit PointCloud(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  const Vec3& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Vec3> points() const { return points_; }

  /// Cloud made of the listed points, in list order.
  PointCloud subset(std::span<const std::size_t> indices) const;

  Vec3 centroid() const;

  friend bool operator==(const PointCloud& a, const PointCloud& b) {
    return a.points_ == b.points_;
  }

 private:
  std::vector<Vec3> points_;
};

/// Proper rigid motion x -> rotation * x + translation.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  RigidTransform() = default;
  /// Throws InvalidArgument unless rotation is orthonormal with det +1
  /// (1e-9 per entry).
  RigidTransform(const Mat3& r, const Vec3& t);

  static RigidTransform identity() { return {}; }

  Vec3 operator()(const Vec3& x) const { return rotation * x + translation; }

  /// Rotation angle of the transform in degrees, in [0, 180].
  double rotation_angle_deg() const;
};

bool is_rotation(const Mat3& r, double tol = 1e-9);

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t);

/// compose(a, b) applies b first, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

RigidTransform invert(const RigidTransform& t);

/// Rotation angles in degrees about the fixed X, Y and Z axes, each in
/// (-180, 180]. The matrix convention is R = Rz(rz) * Ry(ry) * Rx(rx).
struct EulerAngles {
  double rx = 0.0;
  double ry = 0.0;
  double rz = 0.0;
};

struct EulerDecomposition {
  EulerAngles angles;
  // Set when |ry| is within 0.1 degrees of 90. rx is then reported as 0 and
  // the remaining in-plane angle is folded into rz.
  bool gimbal_degenerate = false;
};

Mat3 euler_to_rotation(const EulerAngles& e);
EulerDecomposition rotation_to_euler(const Mat3& r);

/// Wraps an angle in degrees into (-180, 180].
double wrap_degrees(double deg);

}  // namespace spa
