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

#include "spa/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "spa/error.hpp"
#include "spa/random.hpp"

namespace spa {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Patch {
  double area = 0.0;
  std::function<Vec3(Rng&)> sample;
};

Patch rectangle(const Vec3& origin, const Vec3& e1, const Vec3& e2) {
  return {e1.cross(e2).norm(), [=](Rng& rng) {
            const double u = rng.uniform01();
            const double v = rng.uniform01();
            return Vec3(origin + u * e1 + v * e2);
          }};
}

// Lateral surface of a cone frustum about the z axis over an angular range.
Patch frustum_side(double z0, double z1, double r0, double r1, double a0, double a1) {
  const double slant = std::hypot(z1 - z0, r1 - r0);
  const double area = (a1 - a0) * 0.5 * (r0 + r1) * slant;
  const double rmax = std::max(r0, r1);
  return {area, [=](Rng& rng) {
            double s, r;
            do {  // density along the slant is proportional to the radius
              s = rng.uniform01();
              r = r0 + s * (r1 - r0);
            } while (rng.uniform01() * rmax > r);
            const double a = rng.uniform(a0, a1);
            return Vec3(r * std::cos(a), r * std::sin(a), z0 + s * (z1 - z0));
          }};
}

Patch annulus_sector(double z, double r_in, double r_out, double a0, double a1) {
  return {0.5 * (a1 - a0) * (r_out * r_out - r_in * r_in), [=](Rng& rng) {
            const double r = std::sqrt(rng.uniform(r_in * r_in, r_out * r_out));
            const double a = rng.uniform(a0, a1);
            return Vec3(r * std::cos(a), r * std::sin(a), z);
          }};
}

// Prism over a rectilinear profile in the xy plane, extruded on [0, depth].
// `outline` is the closed profile polygon; `cells` tile its interior.
struct Rect2 {
  double x0, y0, x1, y1;
};

std::vector<Patch> extrusion(const std::vector<Eigen::Vector2d>& outline,
                             const std::vector<Rect2>& cells, double depth) {
  std::vector<Patch> patches;
  for (const Rect2& c : cells) {
    const Vec3 e1(c.x1 - c.x0, 0, 0), e2(0, c.y1 - c.y0, 0);
    patches.push_back(rectangle(Vec3(c.x0, c.y0, 0), e1, e2));
    patches.push_back(rectangle(Vec3(c.x0, c.y0, depth), e1, e2));
  }
  for (std::size_t i = 0; i < outline.size(); ++i) {
    const Eigen::Vector2d& a = outline[i];
    const Eigen::Vector2d& b = outline[(i + 1) % outline.size()];
    patches.push_back(rectangle(Vec3(a.x(), a.y(), 0), Vec3(b.x() - a.x(), b.y() - a.y(), 0),
                                Vec3(0, 0, depth)));
  }
  return patches;
}

std::vector<Patch> l_bracket(double v) {
  const double a = 1.0 + 0.6 * v;   // long arm
  const double b = 0.55 + 0.25 * v; // short arm
  const double t = 0.18 + 0.08 * (1.0 - v);
  const double depth = 0.35 + 0.3 * v;
  return extrusion({{0, 0}, {a, 0}, {a, t}, {t, t}, {t, b}, {0, b}},
                   {{0, 0, a, t}, {0, t, t, b}}, depth);
}

std::vector<Patch> stepped_block(double v) {
  const double w1 = 0.3 + 0.15 * v, w2 = 0.35, w3 = 0.45 - 0.1 * v;
  const double h1 = 0.9, h2 = 0.55 + 0.1 * v, h3 = 0.2 + 0.05 * v;
  const double depth = 0.5 + 0.25 * (1.0 - v);
  const double x1 = w1, x2 = w1 + w2, x3 = w1 + w2 + w3;
  return extrusion({{0, 0}, {x3, 0}, {x3, h3}, {x2, h3}, {x2, h2}, {x1, h2}, {x1, h1}, {0, h1}},
                   {{0, 0, x1, h1}, {x1, 0, x2, h2}, {x2, 0, x3, h3}}, depth);
}

std::vector<Patch> notched_cylinder(double v) {
  const double r0 = 0.5, r1 = 0.3 + 0.1 * v;   // tapered toward the top
  const double z0 = 0.0, z1 = 1.1 + 0.3 * v;
  const double zn = 0.45 * z1;                   // notch floor height
  const double depth = 0.15 + 0.05 * v;          // radial notch depth
  const double a0 = 0.3, a1 = a0 + 1.1 + 0.5 * v;  // notch angular range
  auto radius = [&](double z) { return r0 + (r1 - r0) * (z - z0) / (z1 - z0); };
  const double rn = radius(zn);

  std::vector<Patch> p;
  p.push_back(annulus_sector(z0, 0.0, r0, 0.0, kTwoPi));                 // bottom
  p.push_back(frustum_side(z0, zn, r0, rn, 0.0, kTwoPi));                // lower side
  p.push_back(frustum_side(zn, z1, rn, r1, a1, a0 + kTwoPi));            // upper side
  p.push_back(frustum_side(zn, z1, rn - depth, r1 - depth, a0, a1));     // notch back
  p.push_back(annulus_sector(zn, rn - depth, rn, a0, a1));               // notch floor
  p.push_back(annulus_sector(z1, 0.0, r1, a1, a0 + kTwoPi));             // top
  p.push_back(annulus_sector(z1, 0.0, r1 - depth, a0, a1));              // top in notch
  for (double a : {a0, a1}) {                                            // notch walls
    const Vec3 dir(std::cos(a), std::sin(a), 0.0);
    const Vec3 origin = (rn - depth) * dir + Vec3(0, 0, zn);
    const Vec3 up = (r1 - rn) * dir + Vec3(0, 0, z1 - zn);
    p.push_back(rectangle(origin, depth * dir, up));
  }
  return p;
}

std::vector<Vec3> sample_patches(const std::vector<Patch>& patches, std::size_t n,
                                 std::uint64_t seed) {
  std::vector<double> cdf;
  double total = 0.0;
  for (const Patch& p : patches) cdf.push_back(total += p.area);
  Rng rng(seed);
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = rng.uniform01() * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), pick);
    const std::size_t which = std::min<std::size_t>(it - cdf.begin(), patches.size() - 1);
    out.push_back(patches[which].sample(rng));
  }
  return out;
}

void fit_unit_sphere(std::vector<Vec3>& pts, const Vec3& lo, const Vec3& hi) {
  const Vec3 center = 0.5 * (lo + hi);
  const double scale = 1.0 / (0.5 * (hi - lo).norm());
  for (Vec3& p : pts) p = (p - center) * scale;
}

}  // namespace

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::LBracket: return "l-bracket";
    case ShapeKind::SteppedBlock: return "stepped-block";
    case ShapeKind::NotchedCylinder: return "notched-cylinder";
    case ShapeKind::Cube: return "cube";
    case ShapeKind::Plane: return "plane";
  }
  return "unknown";
}

std::optional<ShapeKind> parse_shape_kind(std::string_view name) {
  for (ShapeKind k : {ShapeKind::LBracket, ShapeKind::SteppedBlock,
                      ShapeKind::NotchedCylinder, ShapeKind::Cube, ShapeKind::Plane}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

PointCloud generate_shape(ShapeKind kind, std::size_t n_points, std::uint64_t seed,
                          double variant) {
  if (n_points < 64) {
    throw InvalidArgument("generate_shape needs at least 64 points, got " +
                          std::to_string(n_points));
  }
  if (!(variant >= 0.0 && variant <= 1.0)) {
    throw InvalidArgument("shape variant must lie in [0, 1]");
  }
  switch (kind) {
    case ShapeKind::Plane: {
      Rng rng(seed);
      std::vector<Vec3> pts;
      pts.reserve(n_points);
      for (std::size_t i = 0; i < n_points; ++i) {
        const double x = rng.uniform(-0.5, 0.5);
        const double y = rng.uniform(-0.5, 0.5);
        pts.emplace_back(x, y, 0.0);
      }
      return PointCloud(std::move(pts));
    }
    case ShapeKind::Cube: {
      const double h = 0.5;
      std::vector<Patch> faces;
      for (int axis = 0; axis < 3; ++axis) {
        Vec3 e1 = Vec3::Zero(), e2 = Vec3::Zero();
        e1[(axis + 1) % 3] = 1.0;
        e2[(axis + 2) % 3] = 1.0;
        for (double side : {-h, h}) {
          Vec3 origin = Vec3::Constant(-h);
          origin[axis] = side;
          faces.push_back(rectangle(origin, e1, e2));
        }
      }
      return PointCloud(sample_patches(faces, n_points, seed));
    }
    case ShapeKind::LBracket: {
      const double a = 1.0 + 0.6 * variant, b = 0.55 + 0.25 * variant;
      const double depth = 0.35 + 0.3 * variant;
      auto pts = sample_patches(l_bracket(variant), n_points, seed);
      fit_unit_sphere(pts, Vec3::Zero(), Vec3(a, b, depth));
      return PointCloud(std::move(pts));
    }
    case ShapeKind::SteppedBlock: {
      const double w = 0.3 + 0.15 * variant + 0.35 + 0.45 - 0.1 * variant;
      const double depth = 0.5 + 0.25 * (1.0 - variant);
      auto pts = sample_patches(stepped_block(variant), n_points, seed);
      fit_unit_sphere(pts, Vec3::Zero(), Vec3(w, 0.9, depth));
      return PointCloud(std::move(pts));
    }
    case ShapeKind::NotchedCylinder: {
      const double z1 = 1.1 + 0.3 * variant;
      auto pts = sample_patches(notched_cylinder(variant), n_points, seed);
      fit_unit_sphere(pts, Vec3(-0.5, -0.5, 0.0), Vec3(0.5, 0.5, z1));
      return PointCloud(std::move(pts));
    }
  }
  throw InvalidArgument("unknown shape kind");
}

std::vector<NamedCloud> synthetic_suite(std::size_t n_points, std::uint64_t seed) {
  static constexpr ShapeKind kKinds[] = {ShapeKind::LBracket, ShapeKind::SteppedBlock,
                                         ShapeKind::NotchedCylinder};
  std::vector<NamedCloud> suite;
  suite.reserve(kSuiteSize);
  for (std::size_t i = 0; i < kSuiteSize; ++i) {
    const ShapeKind kind = kKinds[i % 3];
    const std::size_t members = kind == ShapeKind::NotchedCylinder ? 6 : 7;
    const double variant = static_cast<double>(i / 3) / static_cast<double>(members - 1);
    const PointCloud base =
        generate_shape(kind, n_points, mix_seed(seed, i), std::min(variant, 1.0));

    // Fixed pose per suite slot, independent of the sampling seed.
    Rng pose(mix_seed(0x5a17e5ULL, i));
    const EulerAngles e{pose.uniform(-180, 180), pose.uniform(-80, 80),
                        pose.uniform(-180, 180)};
    const RigidTransform placement(euler_to_rotation(e), Vec3::Zero());
    suite.push_back({std::string(to_string(kind)) + "-" + std::to_string(i / 3),
                     apply_transform(base, placement)});
  }
  return suite;
}

}  // namespace spa
