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

#include "spa/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spa/cloud_io.hpp"
#include "spa/error.hpp"

namespace spa {
namespace {

using nlohmann::json;

[[noreturn]] void bad(std::string_view key, std::string_view what) {
  throw UsageError("config key '" + std::string(key) + "': " + std::string(what));
}

double as_double(const json& v, std::string_view key) {
  if (!v.is_number()) bad(key, "expected a number");
  return v.get<double>();
}

std::uint64_t as_unsigned(const json& v, std::string_view key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  bad(key, "expected a nonnegative integer");
}

std::size_t as_count(const json& v, std::string_view key) {
  return static_cast<std::size_t>(as_unsigned(v, key));
}

bool as_bool(const json& v, std::string_view key) {
  if (!v.is_boolean()) bad(key, "expected true or false");
  return v.get<bool>();
}

std::array<std::size_t, kHopCount> as_hop_counts(const json& v, std::string_view key) {
  if (!v.is_array() || v.size() != kHopCount) bad(key, "expected an array of 4 counts");
  std::array<std::size_t, kHopCount> out{};
  for (std::size_t i = 0; i < kHopCount; ++i) out[i] = as_count(v[i], key);
  return out;
}

std::optional<std::filesystem::path> as_path(const json& v, std::string_view key) {
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) bad(key, "expected a path string or null");
  return std::filesystem::path(v.get<std::string>());
}

SelectionStrategy as_selection(const json& v, std::string_view key) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "salient") return SelectionStrategy::Salient;
    if (s == "farthest") return SelectionStrategy::Farthest;
    if (s == "random") return SelectionStrategy::Random;
  }
  bad(key, "expected \"salient\", \"farthest\" or \"random\"");
}

void validate(const RunConfig& c) {
  try {
    c.hop.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (c.spa.salient_points < 3) bad("salient_points", "must be at least 3");
  if (c.spa.iterations < 1) bad("iterations", "must be at least 1");
  if (c.spa.saliency_k < 3) bad("saliency_k", "must be at least 3");
  if (!(c.spa.pool_fraction > 0.0 && c.spa.pool_fraction <= 1.0)) {
    bad("pool_fraction", "must lie in (0, 1]");
  }
  if (!(c.spa.stop_rotation_deg >= 0.0)) bad("stop_rotation_deg", "must be >= 0");
  if (!(c.spa.stop_translation >= 0.0)) bad("stop_translation", "must be >= 0");
  if (c.icp.iterations < 1) bad("icp_iterations", "must be at least 1");
  if (!(c.icp.tolerance >= 0.0)) bad("icp_tolerance", "must be >= 0");
  if (c.angles_deg.empty()) bad("angles", "needs at least one angle");
  for (double a : c.angles_deg) {
    if (!(a >= 0.0 && a < 180.0)) bad("angles", "angles must lie in [0, 180)");
  }
  if (!(c.translation_low <= c.translation_high)) {
    bad("translation_low", "must not exceed translation_high");
  }
  if (!(c.noise_variance >= 0.0)) bad("noise_variance", "must be >= 0");
  if (c.methods.empty()) bad("methods", "needs at least one method");
  if (!(c.histogram_bin_deg > 0.0)) bad("histogram_bin_deg", "must be > 0");
}

}  // namespace

const std::vector<ConfigKey>& run_config_keys() {
  static const std::vector<ConfigKey> keys{
      {"neighbors_per_hop", "[32, 8, 8, 8]", "k nearest neighbors pooled in each hop"},
      {"energy_threshold", "0.0001", "cumulative energy below which a channel is pruned"},
      {"points_per_hop", "[1024, 768, 512, 384]", "working-set size of each hop"},
      {"salient_points", "32", "points selected per cloud (M)"},
      {"iterations", "10", "SPA iterations"},
      {"saliency_k", "32", "neighbors of the local covariance behind lambda"},
      {"pool_fraction", "0.25", "share of highest-lambda points eligible for selection"},
      {"selection", "\"salient\"", "salient, farthest or random"},
      {"match_all_source", "false", "match target points against all source points"},
      {"selection_seed", "0", "seed of the random selection strategy"},
      {"stop_rotation_deg", "0.01", "early-exit rotation increment"},
      {"stop_translation", "1e-05", "early-exit translation increment"},
      {"icp_iterations", "50", "ICP iteration cap"},
      {"icp_tolerance", "1e-10", "ICP stops when the RMSE changes less"},
      {"subsample_to", "1024", "training clouds keep their first N points; 0 keeps all"},
      {"angles", "\"5:60:5\"", "benchmark max angles: start:stop:step or a list"},
      {"translation_low", "-0.5", "lower bound of each translation component"},
      {"translation_high", "0.5", "upper bound of each translation component"},
      {"noise_variance", "0", "Gaussian noise variance added to benchmark sources"},
      {"seed", "0", "benchmark seed"},
      {"permute_source", "true", "shuffle the point order of each benchmark source"},
      {"methods", "\"spa,icp,spa-random,spa-fps\"", "benchmark methods"},
      {"histogram_bin_deg", "1", "bin width of the benchmark error histogram"},
      {"threads", "0", "benchmark workers; 0 = hardware concurrency"},
      {"data", "null", "dataset directory"},
      {"model", "null", "model file"},
      {"out", "null", "output file"},
  };
  return keys;
}

RunConfig parse_run_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config must be a JSON object");

  RunConfig c;
  for (const auto& [key, v] : doc.items()) {
    if (key == "neighbors_per_hop") c.hop.neighbors_per_hop = as_hop_counts(v, key);
    else if (key == "energy_threshold") c.hop.energy_threshold = as_double(v, key);
    else if (key == "points_per_hop") c.hop.points_per_hop = as_hop_counts(v, key);
    else if (key == "salient_points") c.spa.salient_points = as_count(v, key);
    else if (key == "iterations") c.spa.iterations = as_count(v, key);
    else if (key == "saliency_k") c.spa.saliency_k = as_count(v, key);
    else if (key == "pool_fraction") c.spa.pool_fraction = as_double(v, key);
    else if (key == "selection") c.spa.selection = as_selection(v, key);
    else if (key == "match_all_source") c.spa.match_all_source = as_bool(v, key);
    else if (key == "selection_seed") c.spa.selection_seed = as_unsigned(v, key);
    else if (key == "stop_rotation_deg") c.spa.stop_rotation_deg = as_double(v, key);
    else if (key == "stop_translation") c.spa.stop_translation = as_double(v, key);
    else if (key == "icp_iterations") c.icp.iterations = as_count(v, key);
    else if (key == "icp_tolerance") c.icp.tolerance = as_double(v, key);
    else if (key == "subsample_to") c.subsample_to = as_count(v, key);
    else if (key == "angles") {
      if (v.is_string()) {
        c.angles_deg = parse_angle_range(v.get<std::string>());
      } else if (v.is_array()) {
        c.angles_deg.clear();
        for (const json& a : v) c.angles_deg.push_back(as_double(a, key));
      } else {
        bad(key, "expected a range string or an array of numbers");
      }
    } else if (key == "translation_low") c.translation_low = as_double(v, key);
    else if (key == "translation_high") c.translation_high = as_double(v, key);
    else if (key == "noise_variance") c.noise_variance = as_double(v, key);
    else if (key == "seed") c.seed = as_unsigned(v, key);
    else if (key == "permute_source") c.permute_source = as_bool(v, key);
    else if (key == "methods") {
      if (v.is_string()) {
        c.methods = parse_method_list(v.get<std::string>());
      } else if (v.is_array()) {
        std::string joined;
        for (const json& m : v) {
          if (!m.is_string()) bad(key, "expected method names");
          joined += (joined.empty() ? "" : ",") + m.get<std::string>();
        }
        c.methods = parse_method_list(joined);
      } else {
        bad(key, "expected a comma-separated string or an array");
      }
    } else if (key == "histogram_bin_deg") c.histogram_bin_deg = as_double(v, key);
    else if (key == "threads") c.threads = as_count(v, key);
    else if (key == "data") c.data = as_path(v, key);
    else if (key == "model") c.model = as_path(v, key);
    else if (key == "out") c.out = as_path(v, key);
    else throw UsageError("unknown config key '" + key + "'");
  }
  validate(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::vector<double> parse_angle_range(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  std::vector<double> v;
  try {
    for (std::string_view p : parts) v.push_back(parse_double(p));
  } catch (const DataError&) {
    throw UsageError("angle range '" + std::string(text) + "' is not start:stop:step");
  }
  if (v.size() == 1) return v;
  if (v.size() != 3) {
    throw UsageError("angle range '" + std::string(text) + "' is not start:stop:step");
  }
  const double first = v[0], last = v[1], step = v[2];
  if (!(step > 0.0)) throw UsageError("angle step must be positive");
  if (!(last >= first)) throw UsageError("angle range stop precedes start");
  // The small slack keeps a stop that lies on the grid despite rounding.
  const auto count = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = first + static_cast<double>(i) * step;
  return out;
}

std::vector<Method> parse_method_list(std::string_view text) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const std::string_view name = text.substr(start, comma - start);
    const auto m = parse_method(name);
    if (!m) throw UsageError("unknown method '" + std::string(name) + "'");
    out.push_back(*m);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace spa
