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

#include <cstdint>
#include <filesystem>
#include <string>

#include "spa/pointhop.hpp"

namespace spa {

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Flat little-endian encoding of a trained extractor:
///
///   "SPA1", u32 version, u32 neighbors[4], f64 threshold, u32 points[4],
///   u32 feature_dim, then for each hop: u32 kernel count, and per kernel
///   u32 input dim, u32 rows, f64 mean[dim], f64 kernels[rows * dim]
///   (row-major), f64 energies[dim]; then u32 retained count and per retained
///   channel u32 kernel, u32 channel, f64 energy.
///
/// Decoding is bit-exact and independent of host byte order.
std::string encode_model(const FeatureExtractor& extractor);

/// Throws DataError naming the section that failed (truncation, bad magic,
/// unknown version, trailing bytes, inconsistent contents).
FeatureExtractor decode_model(const std::string& bytes);

void save_model(const FeatureExtractor& extractor,
                const std::filesystem::path& path);
FeatureExtractor load_model(const std::filesystem::path& path);

}  // namespace spa
