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

namespace spa {

enum class ShapeKind { LBracket, SteppedBlock, NotchedCylinder, Cube, Plane };

std::string_view to_string(ShapeKind kind);
std::optional<ShapeKind> parse_shape_kind(std::string_view name);

/// Samples `n_points` points uniformly (by area) on the surface of a
/// parametric shape. `variant` in [0, 1] morphs the proportions of the
/// asymmetric kinds; cube (edge 1) and plane (unit square at z = 0) ignore it.
/// Asymmetric kinds are centered on their bounding box and scaled to fit the
/// unit sphere. Deterministic in (kind, n_points, seed, variant).
/// Requires n_points >= 64.
PointCloud generate_shape(ShapeKind kind, std::size_t n_points, std::uint64_t seed,
                          double variant = 0.0);

struct NamedCloud {
  std::string name;
  PointCloud cloud;
};

inline constexpr std::size_t kSuiteSize = 20;

/// The 20-shape desk-scale suite: variants of the three asymmetric kinds,
/// each placed in a fixed generic orientation so no face is axis aligned.
/// Different `seed`s give different surface samples of the same 20 shapes.
std::vector<NamedCloud> synthetic_suite(std::size_t n_points, std::uint64_t seed);

}  // namespace spa
