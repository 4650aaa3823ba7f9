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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spa/geometry.hpp"

namespace spa {

enum class CloudFormat { XyzText, PlyAscii, OffVertices, Csv };

std::string_view to_string(CloudFormat f);
/// Format implied by the file extension (.xyz/.txt, .ply, .off, .csv).
std::optional<CloudFormat> format_from_extension(const std::filesystem::path& path);

struct CloudFile {
  std::filesystem::path path;
  CloudFormat format = CloudFormat::XyzText;
  std::optional<std::string> label;
};

/// Parses a cloud. With `subsample_to`, keeps the first that many points.
/// OFF files contribute their vertices only. Throws DataError with the line
/// number on malformed input, and when the file has fewer points than
/// `subsample_to`.
PointCloud load_cloud(const CloudFile& file,
                      std::optional<std::size_t> subsample_to = std::nullopt);

/// Format inferred from the extension; throws DataError if unknown.
PointCloud load_cloud(const std::filesystem::path& path,
                      std::optional<std::size_t> subsample_to = std::nullopt);

/// Writes with shortest round-trip decimal formatting, so load_cloud
/// recovers every coordinate exactly. Creates missing parent directories.
void write_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                 CloudFormat format);

/// Every recognized cloud file under `dir` (recursive), sorted by path.
/// The label is the name of the file's parent directory below `dir`, if any.
std::vector<CloudFile> list_cloud_files(const std::filesystem::path& dir);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Header plus rows of a comma-separated file.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position by name; throws DataError if absent.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
};

/// Reads a CSV written by this library (no quoting). Rows must match the
/// header width.
CsvTable read_csv(const std::filesystem::path& path);

/// Parses a complete string as a double; throws DataError otherwise.
double parse_double(std::string_view text);

}  // namespace spa
