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

// Hand-built clouds shared by the unit and acceptance tests.

#include <cmath>
#include <cstddef>
#include <vector>

#include "spa/geometry.hpp"

namespace spa::testing {

// side x side grid with unit spacing in the plane z = 0.
inline std::vector<Vec3> plane_grid(int side) {
  std::vector<Vec3> pts;
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) pts.emplace_back(i, j, 0.0);
  }
  return pts;
}

// Two square faces of a cube meeting along the y axis: the floor z = 0 with
// x >= 0 and the wall x = 0 with z > 0, both sampled on a grid of spacing h.
struct CubeEdge {
  std::vector<Vec3> points;
  std::vector<std::size_t> edge;      // points on the shared edge x = z = 0
  std::vector<std::size_t> interior;  // points at least 4h from the edge
};

inline CubeEdge cube_edge(int cells = 16, double h = 1.0 / 16) {
  CubeEdge c;
  for (int j = 0; j <= cells; ++j) {
    for (int i = 0; i <= cells; ++i) {
      const std::size_t idx = c.points.size();
      c.points.emplace_back(i * h, j * h, 0.0);
      if (i == 0) c.edge.push_back(idx);
      if (i >= 4) c.interior.push_back(idx);
    }
    for (int i = 1; i <= cells; ++i) {
      const std::size_t idx = c.points.size();
      c.points.emplace_back(0.0, j * h, i * h);
      if (i >= 4) c.interior.push_back(idx);
    }
  }
  return c;
}

}  // namespace spa::testing
