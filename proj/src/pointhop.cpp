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

#include "spa/pointhop.hpp"

#include <algorithm>
#include <string>

#include "spa/error.hpp"
#include "spa/neighbor_index.hpp"

namespace spa {
namespace {

constexpr int kOctants = 8;

// kNN neighborhoods of every point of a working set, with octant labels.
struct Neighborhoods {
  std::size_t k = 0;
  std::vector<std::uint32_t> index;   // center * k + slot
  std::vector<std::uint8_t> octant;   // center * k + slot
  std::vector<std::array<double, kOctants>> inv_count;  // 0 for empty octants

  std::size_t centers() const { return inv_count.size(); }
};

Neighborhoods gather_neighborhoods(std::span<const Vec3> points, std::size_t k) {
  if (k > points.size()) {
    throw InvalidArgument("hop neighborhood k=" + std::to_string(k) +
                          " exceeds working set of " +
                          std::to_string(points.size()) + " points");
  }
  const NeighborIndex index(points);
  Neighborhoods nb;
  nb.k = k;
  nb.index.resize(points.size() * k);
  nb.octant.resize(points.size() * k);
  nb.inv_count.resize(points.size());
  for (std::size_t c = 0; c < points.size(); ++c) {
    const auto nbrs = index.knn(points[c], k);
    std::array<int, kOctants> count{};
    for (std::size_t s = 0; s < k; ++s) {
      const int o = octant_of(points[nbrs[s]] - points[c]);
      nb.index[c * k + s] = static_cast<std::uint32_t>(nbrs[s]);
      nb.octant[c * k + s] = static_cast<std::uint8_t>(o);
      ++count[o];
    }
    for (int o = 0; o < kOctants; ++o) {
      nb.inv_count[c][o] = count[o] > 0 ? 1.0 / count[o] : 0.0;
    }
  }
  return nb;
}

// 24-vector of octant centroids of neighbor coordinates relative to the center.
Eigen::VectorXd pool_coordinates(std::span<const Vec3> points,
                                 const Neighborhoods& nb, std::size_t c) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(3 * kOctants);
  for (std::size_t s = 0; s < nb.k; ++s) {
    const std::size_t j = nb.index[c * nb.k + s];
    out.segment<3>(3 * nb.octant[c * nb.k + s]) += points[j] - points[c];
  }
  for (int o = 0; o < kOctants; ++o) out.segment<3>(3 * o) *= nb.inv_count[c][o];
  return out;
}

// 8-vector of octant means of one attribute column.
Eigen::VectorXd pool_channel(const Neighborhoods& nb,
                             const Eigen::MatrixXd& attributes,
                             Eigen::Index column, std::size_t c) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(kOctants);
  for (std::size_t s = 0; s < nb.k; ++s) {
    out(nb.octant[c * nb.k + s]) += attributes(nb.index[c * nb.k + s], column);
  }
  for (int o = 0; o < kOctants; ++o) out(o) *= nb.inv_count[c][o];
  return out;
}

// Pooled inputs of `kernel` at every center; one sample per row.
Eigen::MatrixXd pooled_inputs(std::size_t hop, std::span<const Vec3> points,
                              const Neighborhoods& nb,
                              const Eigen::MatrixXd& attributes,
                              std::size_t kernel) {
  const auto n = static_cast<Eigen::Index>(nb.centers());
  if (hop == 0) {
    Eigen::MatrixXd out(n, 3 * kOctants);
    for (Eigen::Index c = 0; c < n; ++c) {
      out.row(c) = pool_coordinates(points, nb, c).transpose();
    }
    return out;
  }
  Eigen::MatrixXd out(n, kOctants);
  for (Eigen::Index c = 0; c < n; ++c) {
    out.row(c) =
        pool_channel(nb, attributes, static_cast<Eigen::Index>(kernel), c).transpose();
  }
  return out;
}

// Responses of the retained channels of `model` at every center.
Eigen::MatrixXd hop_responses(std::size_t hop, const HopModel& model,
                              std::span<const Vec3> points,
                              const Neighborhoods& nb,
                              const Eigen::MatrixXd& attributes) {
  const auto n = static_cast<Eigen::Index>(nb.centers());
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(model.retained.size()));
  std::size_t r = 0;
  while (r < model.retained.size()) {
    const std::uint32_t kernel_id = model.retained[r].kernel;
    std::size_t r_end = r;
    while (r_end < model.retained.size() &&
           model.retained[r_end].kernel == kernel_id) {
      ++r_end;
    }
    const SaabKernel& kernel = model.kernels[kernel_id];
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(r_end - r),
                         static_cast<Eigen::Index>(kernel.input_dim()));
    for (std::size_t q = r; q < r_end; ++q) {
      rows.row(static_cast<Eigen::Index>(q - r)) =
          kernel.kernels.row(model.retained[q].channel);
    }
    const Eigen::MatrixXd inputs =
        pooled_inputs(hop, points, nb, attributes, kernel_id).rowwise() -
        kernel.mean.transpose();
    out.middleCols(static_cast<Eigen::Index>(r),
                   static_cast<Eigen::Index>(r_end - r)) = inputs * rows.transpose();
    r = r_end;
  }
  return out;
}

// Working set of one hop for one cloud.
struct HopState {
  std::vector<Vec3> points;
  std::vector<std::size_t> from_previous;  // indices into the previous level
  Neighborhoods nb;
  Eigen::MatrixXd attributes;  // inputs: previous responses at these points
};

HopState enter_hop(std::size_t hop, const HopConfig& config,
                   std::span<const Vec3> prev_points,
                   const Eigen::MatrixXd& prev_responses) {
  HopState st;
  const std::size_t m = std::min(config.points_per_hop[hop], prev_points.size());
  st.from_previous = farthest_point_sample(prev_points, m, 0);
  st.points.reserve(m);
  for (std::size_t i : st.from_previous) st.points.push_back(prev_points[i]);
  if (hop > 0) {
    st.attributes.resize(static_cast<Eigen::Index>(m), prev_responses.cols());
    for (std::size_t i = 0; i < m; ++i) {
      st.attributes.row(static_cast<Eigen::Index>(i)) =
          prev_responses.row(static_cast<Eigen::Index>(st.from_previous[i]));
    }
  }
  st.nb = gather_neighborhoods(st.points, config.neighbors_per_hop[hop]);
  return st;
}

struct Retention {
  std::vector<RetainedChannel> channels;
  std::size_t dc_chain = 0;  // position of the DC-chain channel in `channels`
};

// Channels whose cumulative energy reaches the threshold, in (kernel, channel)
// order. Channel 0 of the DC-chain kernel is kept unconditionally so every
// hop emits at least one channel.
Retention retain_channels(const std::vector<SaabKernel>& kernels,
                          const std::vector<double>& parent_energy,
                          std::size_t dc_chain_kernel, double threshold) {
  Retention out;
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    for (Eigen::Index j = 0; j < kernels[k].energies.size(); ++j) {
      const double e = parent_energy[k] * kernels[k].energies(j);
      const bool chain = k == dc_chain_kernel && j == 0;
      if (chain) out.dc_chain = out.channels.size();
      if (chain || e >= threshold) {
        out.channels.push_back({static_cast<std::uint32_t>(k),
                                static_cast<std::uint32_t>(j), e});
      }
    }
  }
  return out;
}

// Drops kernel rows past the highest retained channel of each kernel.
void truncate_kernels(HopModel& model) {
  std::vector<Eigen::Index> rows(model.kernels.size(), 0);
  for (const RetainedChannel& c : model.retained) {
    rows[c.kernel] = std::max<Eigen::Index>(rows[c.kernel], c.channel + 1);
  }
  for (std::size_t k = 0; k < model.kernels.size(); ++k) {
    Eigen::MatrixXd kept = model.kernels[k].kernels.topRows(std::max<Eigen::Index>(rows[k], 1));
    model.kernels[k].kernels = std::move(kept);
  }
}

}  // namespace

void HopConfig::validate() const {
  if (!(energy_threshold > 0.0 && energy_threshold < 1.0)) {
    throw InvalidArgument("energy_threshold must lie in (0, 1)");
  }
  for (std::size_t h = 0; h < kHopCount; ++h) {
    if (neighbors_per_hop[h] < 8) {
      throw InvalidArgument("neighbors_per_hop[" + std::to_string(h) +
                            "] must be at least 8");
    }
    if (points_per_hop[h] < neighbors_per_hop[h]) {
      throw InvalidArgument("points_per_hop[" + std::to_string(h) +
                            "] is smaller than its neighborhood size");
    }
    if (h > 0 && points_per_hop[h] > points_per_hop[h - 1]) {
      throw InvalidArgument("points_per_hop must be nonincreasing");
    }
  }
}

FeatureExtractor::FeatureExtractor(HopConfig config,
                                   std::array<HopModel, kHopCount> hops)
    : config_(config), hops_(std::move(hops)) {
  config_.validate();
  for (std::size_t h = 0; h < kHopCount; ++h) {
    const HopModel& hop = hops_[h];
    const std::size_t expected_kernels = h == 0 ? 1 : hops_[h - 1].retained.size();
    const std::size_t expected_dim = h == 0 ? 3 * kOctants : kOctants;
    if (hop.kernels.size() != expected_kernels) {
      throw InvalidArgument("hop " + std::to_string(h + 1) + " has " +
                            std::to_string(hop.kernels.size()) +
                            " kernels, expected " + std::to_string(expected_kernels));
    }
    for (const SaabKernel& k : hop.kernels) {
      if (k.input_dim() != expected_dim || k.kernels.rows() < 1 ||
          k.kernels.rows() > static_cast<Eigen::Index>(expected_dim) ||
          k.kernels.cols() != static_cast<Eigen::Index>(expected_dim) ||
          k.energies.size() != static_cast<Eigen::Index>(expected_dim)) {
        throw InvalidArgument("hop " + std::to_string(h + 1) +
                              " kernel has inconsistent dimensions");
      }
    }
    if (hop.retained.empty()) {
      throw InvalidArgument("hop " + std::to_string(h + 1) + " retains no channels");
    }
    for (std::size_t r = 0; r < hop.retained.size(); ++r) {
      const RetainedChannel& c = hop.retained[r];
      if (c.kernel >= hop.kernels.size() ||
          c.channel >= hop.kernels[c.kernel].channel_count()) {
        throw InvalidArgument("hop " + std::to_string(h + 1) +
                              " retained channel out of range");
      }
      if (r > 0 && (c.kernel < hop.retained[r - 1].kernel ||
                    (c.kernel == hop.retained[r - 1].kernel &&
                     c.channel <= hop.retained[r - 1].channel))) {
        throw InvalidArgument("hop " + std::to_string(h + 1) +
                              " retained channels are not ordered");
      }
    }
    feature_dim_ += hop.retained.size();
  }
}

int octant_of(const Vec3& relative) {
  return (relative.x() < 0.0 ? 4 : 0) | (relative.y() < 0.0 ? 2 : 0) |
         (relative.z() < 0.0 ? 1 : 0);
}

Eigen::VectorXd octant_pool(const PointCloud& cloud,
                            const Eigen::MatrixXd& attributes,
                            std::size_t center, std::size_t k) {
  if (attributes.rows() != static_cast<Eigen::Index>(cloud.size())) {
    throw InvalidArgument("octant_pool: attribute rows do not match the cloud");
  }
  if (center >= cloud.size()) throw InvalidArgument("octant_pool: bad center");
  const NeighborIndex index(cloud);
  const auto nbrs = index.knn(cloud[center], k);
  const Eigen::Index c = attributes.cols();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(kOctants * c);
  std::array<int, kOctants> count{};
  for (std::size_t j : nbrs) {
    const int o = octant_of(cloud[j] - cloud[center]);
    out.segment(o * c, c) += attributes.row(static_cast<Eigen::Index>(j)).transpose();
    ++count[o];
  }
  for (int o = 0; o < kOctants; ++o) {
    if (count[o] > 0) out.segment(o * c, c) /= count[o];
  }
  return out;
}

FeatureExtractor train_feature_extractor(const std::vector<PointCloud>& clouds,
                                         const HopConfig& config) {
  config.validate();
  if (clouds.empty()) throw InvalidArgument("training needs at least one cloud");
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    if (clouds[i].size() < config.points_per_hop[0]) {
      throw InvalidArgument("training cloud " + std::to_string(i) + " has " +
                            std::to_string(clouds[i].size()) +
                            " points, hop 1 needs " +
                            std::to_string(config.points_per_hop[0]));
    }
  }

  std::array<HopModel, kHopCount> hops;
  std::vector<std::vector<Vec3>> prev_points(clouds.size());
  std::vector<Eigen::MatrixXd> prev_responses(clouds.size());
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    prev_points[i].assign(clouds[i].points().begin(), clouds[i].points().end());
  }
  std::vector<double> parent_energy{1.0};
  std::size_t dc_chain = 0;

  for (std::size_t h = 0; h < kHopCount; ++h) {
    std::vector<HopState> states;
    states.reserve(clouds.size());
    for (std::size_t i = 0; i < clouds.size(); ++i) {
      states.push_back(enter_hop(h, config, prev_points[i], prev_responses[i]));
    }

    HopModel& model = hops[h];
    const std::size_t kernel_count = parent_energy.size();
    model.kernels.reserve(kernel_count);
    for (std::size_t k = 0; k < kernel_count; ++k) {
      Eigen::Index rows = 0;
      for (const HopState& st : states) rows += static_cast<Eigen::Index>(st.nb.centers());
      Eigen::MatrixXd samples(rows, h == 0 ? 3 * kOctants : kOctants);
      Eigen::Index at = 0;
      for (const HopState& st : states) {
        const Eigen::MatrixXd part = pooled_inputs(h, st.points, st.nb, st.attributes, k);
        samples.middleRows(at, part.rows()) = part;
        at += part.rows();
      }
      model.kernels.push_back(fit_saab(samples));
    }

    Retention kept = retain_channels(model.kernels, parent_energy, dc_chain,
                                     config.energy_threshold);
    model.retained = std::move(kept.channels);
    dc_chain = kept.dc_chain;
    truncate_kernels(model);

    parent_energy.clear();
    for (const RetainedChannel& c : model.retained) parent_energy.push_back(c.energy);
    for (std::size_t i = 0; i < clouds.size(); ++i) {
      prev_responses[i] =
          hop_responses(h, model, states[i].points, states[i].nb, states[i].attributes);
      prev_points[i] = std::move(states[i].points);
    }
  }
  return FeatureExtractor(config, std::move(hops));
}

FeatureMatrix extract_features(const FeatureExtractor& extractor,
                               const PointCloud& cloud) {
  const HopConfig& config = extractor.config();
  const auto n = static_cast<Eigen::Index>(cloud.size());
  FeatureMatrix features(n, static_cast<Eigen::Index>(extractor.feature_dim()));

  std::vector<Vec3> prev_points(cloud.points().begin(), cloud.points().end());
  Eigen::MatrixXd prev_responses;
  Eigen::Index col = 0;
  for (std::size_t h = 0; h < kHopCount; ++h) {
    HopState st = enter_hop(h, config, prev_points, prev_responses);
    const HopModel& model = extractor.hops()[h];
    Eigen::MatrixXd responses = hop_responses(h, model, st.points, st.nb, st.attributes);

    const NeighborIndex index(st.points);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t src = index.nearest(cloud[static_cast<std::size_t>(i)]);
      features.row(i).segment(col, responses.cols()) =
          responses.row(static_cast<Eigen::Index>(src));
    }
    col += responses.cols();
    prev_points = std::move(st.points);
    prev_responses = std::move(responses);
  }
  return features;
}

}  // namespace spa
