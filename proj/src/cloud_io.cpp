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

#include "spa/cloud_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "spa/error.hpp"

namespace spa {
namespace fs = std::filesystem;
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b = s.find_first_not_of(seps, i);
    if (b == std::string_view::npos) break;
    auto e = s.find_first_of(seps, b);
    if (e == std::string_view::npos) e = s.size();
    out.push_back(s.substr(b, e - b));
    i = e;
  }
  return out;
}

// Fields of a CSV line, keeping empty fields.
std::vector<std::string_view> split_csv(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

class LineReader {
 public:
  explicit LineReader(const fs::path& path) : path_(path), in_(path) {
    if (!in_) throw DataError("cannot open " + path.string());
  }

  // Next line that is not blank and not a '#' comment.
  bool next(std::string_view& line) {
    while (std::getline(in_, buffer_)) {
      ++number_;
      line = trim(buffer_);
      if (!line.empty() && line.front() != '#') return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(path_.string() + ":" + std::to_string(number_) + ": " + what);
  }

  double number(std::string_view field) const {
    try {
      return parse_double(field);
    } catch (const DataError&) {
      fail("expected a number, got '" + std::string(field) + "'");
    }
  }

  Vec3 point(const std::vector<std::string_view>& fields,
             const std::array<std::size_t, 3>& cols) const {
    Vec3 p;
    for (int d = 0; d < 3; ++d) {
      if (cols[d] >= fields.size()) fail("line has too few fields");
      p[d] = number(fields[cols[d]]);
      if (!std::isfinite(p[d])) fail("non-finite coordinate");
    }
    return p;
  }

 private:
  fs::path path_;
  std::ifstream in_;
  std::string buffer_;
  std::size_t number_ = 0;
};

std::vector<Vec3> parse_xyz(LineReader& r) {
  std::vector<Vec3> pts;
  std::string_view line;
  while (r.next(line)) pts.push_back(r.point(split(line, " \t,"), {0, 1, 2}));
  return pts;
}

std::vector<Vec3> parse_csv(LineReader& r) {
  std::string_view line;
  if (!r.next(line)) r.fail("missing header");
  const auto header = split_csv(line);
  std::array<std::size_t, 3> cols{};
  const char* names[3] = {"x", "y", "z"};
  for (int d = 0; d < 3; ++d) {
    const auto it = std::find(header.begin(), header.end(), names[d]);
    if (it == header.end()) r.fail(std::string("header lacks column '") + names[d] + "'");
    cols[d] = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<Vec3> pts;
  while (r.next(line)) {
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) r.fail("row width differs from the header");
    pts.push_back(r.point(fields, cols));
  }
  return pts;
}

std::vector<Vec3> parse_ply(LineReader& r) {
  std::string_view line;
  if (!r.next(line) || line != "ply") r.fail("missing 'ply' magic");
  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;
  };
  std::vector<Element> elements;
  bool ascii = false;
  while (true) {
    if (!r.next(line)) r.fail("header ends before end_header");
    const auto f = split(line, " \t");
    if (f[0] == "end_header") break;
    if (f[0] == "format") {
      if (f.size() < 2 || f[1] != "ascii") r.fail("only ascii PLY is supported");
      ascii = true;
    } else if (f[0] == "element") {
      if (f.size() != 3) r.fail("malformed element line");
      elements.push_back({std::string(f[1]), 0, {}});
      const double count = r.number(f[2]);
      if (count < 0 || count != std::floor(count)) r.fail("bad element count");
      elements.back().count = static_cast<std::size_t>(count);
    } else if (f[0] == "property") {
      if (elements.empty()) r.fail("property before any element");
      elements.back().properties.emplace_back(f.back());
    } else if (f[0] != "comment" && f[0] != "obj_info") {
      r.fail("unknown header keyword '" + std::string(f[0]) + "'");
    }
  }
  if (!ascii) r.fail("missing format line");
  std::vector<Vec3> pts;
  for (const Element& e : elements) {
    if (e.name != "vertex") {
      for (std::size_t i = 0; i < e.count; ++i) {
        if (!r.next(line)) r.fail("file ends inside element '" + e.name + "'");
      }
      continue;
    }
    std::array<std::size_t, 3> cols{};
    const char* names[3] = {"x", "y", "z"};
    for (int d = 0; d < 3; ++d) {
      const auto it = std::find(e.properties.begin(), e.properties.end(), names[d]);
      if (it == e.properties.end()) r.fail(std::string("vertex lacks property ") + names[d]);
      cols[d] = static_cast<std::size_t>(it - e.properties.begin());
    }
    for (std::size_t i = 0; i < e.count; ++i) {
      if (!r.next(line)) r.fail("file ends inside the vertex list");
      const auto fields = split(line, " \t");
      if (fields.size() != e.properties.size()) r.fail("vertex line has wrong field count");
      pts.push_back(r.point(fields, cols));
    }
    return pts;
  }
  r.fail("no vertex element");
}

std::vector<Vec3> parse_off(LineReader& r) {
  std::string_view line;
  if (!r.next(line) || line.substr(0, 3) != "OFF") r.fail("missing 'OFF' magic");
  // Some OFF writers glue the counts onto the magic line.
  std::string_view counts = trim(line.substr(3));
  if (counts.empty() && !r.next(counts)) r.fail("missing vertex/face counts");
  const auto c = split(counts, " \t");
  if (c.size() < 2) r.fail("malformed counts line");
  const double nv = r.number(c[0]);
  if (nv < 0 || nv != std::floor(nv)) r.fail("bad vertex count");
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < static_cast<std::size_t>(nv); ++i) {
    if (!r.next(line)) r.fail("file ends inside the vertex list");
    const auto fields = split(line, " \t");
    if (fields.size() < 3) r.fail("vertex line has too few fields");
    pts.push_back(r.point(fields, {0, 1, 2}));
  }
  return pts;
}

}  // namespace

std::string_view to_string(CloudFormat f) {
  switch (f) {
    case CloudFormat::XyzText: return "xyz";
    case CloudFormat::PlyAscii: return "ply";
    case CloudFormat::OffVertices: return "off";
    case CloudFormat::Csv: return "csv";
  }
  return "unknown";
}

std::optional<CloudFormat> format_from_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (ext == ".xyz" || ext == ".txt" || ext == ".pts") return CloudFormat::XyzText;
  if (ext == ".ply") return CloudFormat::PlyAscii;
  if (ext == ".off") return CloudFormat::OffVertices;
  if (ext == ".csv") return CloudFormat::Csv;
  return std::nullopt;
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

PointCloud load_cloud(const CloudFile& file, std::optional<std::size_t> subsample_to) {
  LineReader reader(file.path);
  std::vector<Vec3> pts;
  switch (file.format) {
    case CloudFormat::XyzText: pts = parse_xyz(reader); break;
    case CloudFormat::Csv: pts = parse_csv(reader); break;
    case CloudFormat::PlyAscii: pts = parse_ply(reader); break;
    case CloudFormat::OffVertices: pts = parse_off(reader); break;
  }
  if (pts.empty()) throw DataError(file.path.string() + ": no points");
  if (subsample_to) {
    if (pts.size() < *subsample_to) {
      throw DataError(file.path.string() + ": has " + std::to_string(pts.size()) +
                      " points, fewer than the requested " +
                      std::to_string(*subsample_to));
    }
    pts.resize(*subsample_to);
  }
  return PointCloud(std::move(pts));
}

PointCloud load_cloud(const fs::path& path, std::optional<std::size_t> subsample_to) {
  const auto format = format_from_extension(path);
  if (!format) throw DataError(path.string() + ": unrecognized cloud file extension");
  return load_cloud(CloudFile{path, *format, std::nullopt}, subsample_to);
}

void write_cloud(const PointCloud& cloud, const fs::path& path, CloudFormat format) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  auto row = [&](const Vec3& p, char sep) {
    out << format_double(p.x()) << sep << format_double(p.y()) << sep
        << format_double(p.z()) << '\n';
  };
  switch (format) {
    case CloudFormat::XyzText:
      for (const Vec3& p : cloud.points()) row(p, ' ');
      break;
    case CloudFormat::Csv:
      out << "x,y,z\n";
      for (const Vec3& p : cloud.points()) row(p, ',');
      break;
    case CloudFormat::PlyAscii:
      out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
          << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
      for (const Vec3& p : cloud.points()) row(p, ' ');
      break;
    case CloudFormat::OffVertices:
      out << "OFF\n" << cloud.size() << " 0 0\n";
      for (const Vec3& p : cloud.points()) row(p, ' ');
      break;
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<CloudFile> list_cloud_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError(dir.string() + " is not a directory");
  std::vector<CloudFile> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto format = format_from_extension(entry.path());
    if (!format) continue;
    CloudFile f{entry.path(), *format, std::nullopt};
    const fs::path rel = fs::relative(entry.path().parent_path(), dir);
    if (!rel.empty() && rel != ".") f.label = rel.filename().string();
    files.push_back(std::move(f));
  }
  std::sort(files.begin(), files.end(),
            [](const CloudFile& a, const CloudFile& b) { return a.path < b.path; });
  return files;
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError("csv has no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t row, std::string_view name) const {
  return parse_double(rows.at(row).at(column(name)));
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    for (std::string_view f : split_csv(line)) fields.emplace_back(f);
    if (table.header.empty()) {
      table.header = std::move(fields);
    } else if (fields.size() != table.header.size()) {
      throw DataError(path.string() + ":" + std::to_string(number) +
                      ": row width differs from the header");
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  if (table.header.empty()) throw DataError(path.string() + ": empty csv");
  return table;
}

}  // namespace spa
