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

#include "spa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spa/error.hpp"

namespace spa {
namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;
constexpr double kRadPerDeg = std::numbers::pi / 180.0;

}  // namespace

PointCloud::PointCloud(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.empty()) {
    throw InvalidArgument("point cloud must contain at least one point");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].allFinite()) {
      throw InvalidArgument("point " + std::to_string(i) +
                            " has a non-finite coordinate");
    }
  }
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
  std::vector<Vec3> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= points_.size()) {
      throw InvalidArgument("subset index " + std::to_string(i) +
                            " out of range");
    }
    out.push_back(points_[i]);
  }
  return PointCloud(std::move(out));
}

Vec3 PointCloud::centroid() const {
  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : points_) sum += p;
  return sum / static_cast<double>(points_.size());
}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  const Mat3 gram = r.transpose() * r;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(r.determinant() - 1.0) <= tol;
}

RigidTransform::RigidTransform(const Mat3& r, const Vec3& t)
    : rotation(r), translation(t) {
  if (!is_rotation(r)) {
    throw InvalidArgument("rotation matrix is not orthonormal with det +1");
  }
  if (!t.allFinite()) {
    throw InvalidArgument("translation has a non-finite component");
  }
}

double RigidTransform::rotation_angle_deg() const {
  const double c = std::clamp((rotation.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * kDegPerRad;
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t) {
  std::vector<Vec3> out;
  out.reserve(cloud.size());
  for (const Vec3& p : cloud.points()) out.push_back(t(p));
  return PointCloud(std::move(out));
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform c;
  c.rotation = a.rotation * b.rotation;
  c.translation = a.rotation * b.translation + a.translation;
  return c;
}

RigidTransform invert(const RigidTransform& t) {
  RigidTransform inv;
  inv.rotation = t.rotation.transpose();
  inv.translation = -(inv.rotation * t.translation);
  return inv;
}

double wrap_degrees(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w > 180.0) w -= 360.0;
  if (w <= -180.0) w += 360.0;
  return w;
}

Mat3 euler_to_rotation(const EulerAngles& e) {
  const double cx = std::cos(e.rx * kRadPerDeg), sx = std::sin(e.rx * kRadPerDeg);
  const double cy = std::cos(e.ry * kRadPerDeg), sy = std::sin(e.ry * kRadPerDeg);
  const double cz = std::cos(e.rz * kRadPerDeg), sz = std::sin(e.rz * kRadPerDeg);
  Mat3 rx, ry, rz;
  rx << 1, 0, 0, 0, cx, -sx, 0, sx, cx;
  ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
  rz << cz, -sz, 0, sz, cz, 0, 0, 0, 1;
  return rz * ry * rx;
}

EulerDecomposition rotation_to_euler(const Mat3& r) {
  EulerDecomposition out;
  const double sy = std::clamp(-r(2, 0), -1.0, 1.0);
  const double ry = std::asin(sy) * kDegPerRad;
  if (std::abs(std::abs(ry) - 90.0) < 0.1) {
    // cos(ry) ~ 0: only rz -/+ rx is observable.
    out.gimbal_degenerate = true;
    out.angles.rx = 0.0;
    out.angles.ry = ry;
    out.angles.rz = wrap_degrees(std::atan2(-r(0, 1), r(1, 1)) * kDegPerRad);
    return out;
  }
  out.angles.rx = wrap_degrees(std::atan2(r(2, 1), r(2, 2)) * kDegPerRad);
  out.angles.ry = ry;
  out.angles.rz = wrap_degrees(std::atan2(r(1, 0), r(0, 0)) * kDegPerRad);
  return out;
}

}  // namespace spa
