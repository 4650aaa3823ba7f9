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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spa/evaluation.hpp"
#include "spa/pointhop.hpp"
#include "spa/registration.hpp"

namespace spa {

/// Every tunable of a run. Loaded from a JSON object whose keys are listed
/// in `run_config_keys()`; any key may be omitted and takes the default
/// shown there. Unknown keys are rejected. Command line flags override the
/// file.
struct RunConfig {
  HopConfig hop;
  SpaOptions spa;
  IcpOptions icp;
  // Training clouds keep their first this many points; 0 keeps all.
  std::size_t subsample_to = 1024;
  std::vector<double> angles_deg{5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60};
  double translation_low = -0.5;
  double translation_high = 0.5;
  double noise_variance = 0.0;
  std::uint64_t seed = 0;
  // Benchmark sources are shuffled copies of their targets unless false.
  bool permute_source = true;
  std::vector<Method> methods{Method::Spa, Method::Icp, Method::SpaRandom, Method::SpaFps};
  double histogram_bin_deg = 1.0;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> out;
};

struct ConfigKey {
  std::string_view name;
  std::string_view default_value;
  std::string_view meaning;
};

/// Documented keys in file order.
const std::vector<ConfigKey>& run_config_keys();

/// Parses JSON text ('//' and '/* */' comments allowed). Throws UsageError on
/// malformed text, unknown keys, wrongly typed values or values that break a
/// HopConfig or option invariant.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// "start:stop:step", inclusive of stop when it lies on the grid, or a single
/// value. Throws UsageError on malformed input or a nonpositive step.
std::vector<double> parse_angle_range(std::string_view text);

/// Comma-separated method names (spa, icp, spa-random, spa-fps).
std::vector<Method> parse_method_list(std::string_view text);

}  // namespace spa
