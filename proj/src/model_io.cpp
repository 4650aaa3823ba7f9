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

#include "spa/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "spa/error.hpp"

namespace spa {
namespace {

constexpr char kMagic[4] = {'S', 'P', 'A', '1'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  void count(std::size_t n) {
    if (n > std::numeric_limits<std::uint32_t>::max()) {
      throw InvalidArgument("model dimension exceeds 32 bits");
    }
    u32(static_cast<std::uint32_t>(n));
  }
  void raw(const char* data, std::size_t n) { out_.append(data, n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  void section(std::string name) { section_ = std::move(name); }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("model " + section_ + ": " + what);
  }

  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail("payload shorter than header promises");
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

  // Guards allocations against counts no remaining payload could satisfy.
  void need_doubles(std::uint64_t n) const {
    if (n > (bytes_.size() - pos_) / 8) fail("payload shorter than header promises");
  }

  bool at_end() const { return pos_ == bytes_.size(); }

  bool take_prefix(const char* expected, std::size_t n) {
    need(n);
    if (std::memcmp(bytes_.data() + pos_, expected, n) != 0) return false;
    pos_ += n;
    return true;
  }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
  std::string section_ = "header";
};

void write_kernel(Writer& w, const SaabKernel& k) {
  const std::size_t d = k.input_dim();
  w.count(d);
  w.count(k.channel_count());
  for (std::size_t i = 0; i < d; ++i) w.f64(k.mean[i]);
  for (Eigen::Index r = 0; r < k.kernels.rows(); ++r) {
    for (Eigen::Index c = 0; c < k.kernels.cols(); ++c) w.f64(k.kernels(r, c));
  }
  for (std::size_t i = 0; i < d; ++i) w.f64(k.energies[i]);
}

SaabKernel read_kernel(Reader& r) {
  const std::uint32_t d = r.u32();
  const std::uint32_t rows = r.u32();
  if (d == 0 || rows == 0 || rows > d) r.fail("bad kernel shape");
  r.need_doubles(static_cast<std::uint64_t>(d) * (rows + 2));
  SaabKernel k;
  k.mean.resize(d);
  for (std::uint32_t i = 0; i < d; ++i) k.mean[i] = r.f64();
  k.kernels.resize(rows, d);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) k.kernels(i, j) = r.f64();
  }
  k.energies.resize(d);
  for (std::uint32_t i = 0; i < d; ++i) k.energies[i] = r.f64();
  return k;
}

}  // namespace

std::string encode_model(const FeatureExtractor& extractor) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kModelFormatVersion);
  const HopConfig& cfg = extractor.config();
  for (std::size_t n : cfg.neighbors_per_hop) w.count(n);
  w.f64(cfg.energy_threshold);
  for (std::size_t n : cfg.points_per_hop) w.count(n);
  w.count(extractor.feature_dim());
  for (const HopModel& hop : extractor.hops()) {
    w.count(hop.kernels.size());
    for (const SaabKernel& k : hop.kernels) write_kernel(w, k);
    w.count(hop.retained.size());
    for (const RetainedChannel& ch : hop.retained) {
      w.u32(ch.kernel);
      w.u32(ch.channel);
      w.f64(ch.energy);
    }
  }
  return w.take();
}

FeatureExtractor decode_model(const std::string& bytes) {
  Reader body(bytes);
  body.section("magic");
  if (!body.take_prefix(kMagic, sizeof kMagic)) body.fail("not an SPA model file");
  body.section("header");
  const std::uint32_t version = body.u32();
  if (version != kModelFormatVersion) {
    body.fail("unsupported format version " + std::to_string(version));
  }
  HopConfig cfg;
  for (auto& n : cfg.neighbors_per_hop) n = body.u32();
  cfg.energy_threshold = body.f64();
  for (auto& n : cfg.points_per_hop) n = body.u32();
  const std::uint32_t feature_dim = body.u32();

  std::array<HopModel, kHopCount> hops;
  for (std::size_t h = 0; h < kHopCount; ++h) {
    body.section("hop " + std::to_string(h + 1) + " kernels");
    const std::uint32_t kernel_count = body.u32();
    body.need_doubles(kernel_count);
    hops[h].kernels.reserve(kernel_count);
    for (std::uint32_t i = 0; i < kernel_count; ++i) hops[h].kernels.push_back(read_kernel(body));
    body.section("hop " + std::to_string(h + 1) + " retained channels");
    const std::uint32_t retained = body.u32();
    body.need_doubles(static_cast<std::uint64_t>(retained) * 2);
    hops[h].retained.reserve(retained);
    for (std::uint32_t i = 0; i < retained; ++i) {
      RetainedChannel ch;
      ch.kernel = body.u32();
      ch.channel = body.u32();
      ch.energy = body.f64();
      hops[h].retained.push_back(ch);
    }
  }
  body.section("trailer");
  if (!body.at_end()) body.fail("unexpected trailing bytes");

  try {
    FeatureExtractor extractor(cfg, std::move(hops));
    if (extractor.feature_dim() != feature_dim) {
      throw DataError("model header: feature_dim disagrees with the retained channels");
    }
    return extractor;
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("model contents: ") + e.what());
  }
}

void save_model(const FeatureExtractor& extractor, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::string bytes = encode_model(extractor);
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("cannot write model " + path.string());
}

FeatureExtractor load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_model(bytes);
}

}  // namespace spa
