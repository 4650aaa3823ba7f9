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

#include "spa/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "spa/error.hpp"
#include "spa/random.hpp"

namespace spa {
namespace {

// Runs task(i) for i in [0, n) on up to `threads` workers.
template <typename Task>
void parallel_for(std::size_t n, std::size_t threads, Task&& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) task(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Outcome {
  bool ok = false;
  PoseSample estimate;
};

Outcome run_method(Method method, const PointCloud& target, const PointCloud& source,
                   const SweepSettings& settings, const FeatureExtractor* extractor,
                   std::uint64_t selection_seed) {
  RegistrationResult r;
  try {
    if (method == Method::Icp) {
      r = register_icp(target, source, settings.icp);
    } else {
      SpaOptions opt = settings.spa;
      opt.selection_seed = selection_seed;
      opt.selection = method == Method::SpaRandom ? SelectionStrategy::Random
                      : method == Method::SpaFps  ? SelectionStrategy::Farthest
                                                  : SelectionStrategy::Salient;
      r = register_spa(target, source, *extractor, opt);
    }
  } catch (const Error&) {
    return {};  // counted as a failed sample
  }
  if (r.degenerate || r.iterations_run == 0) return {};
  // The sampled motion maps target to source; the registration estimates the
  // opposite direction.
  const RigidTransform estimate = invert(r.transform);
  return {true, {rotation_to_euler(estimate.rotation).angles, estimate.translation}};
}

}  // namespace

SampledTransform sample_transform(const TransformSpec& spec) {
  if (!(spec.max_rotation_deg >= 0.0 && spec.max_rotation_deg < 180.0)) {
    throw InvalidArgument("max_rotation_deg must lie in [0, 180)");
  }
  if (!(spec.translation_low <= spec.translation_high)) {
    throw InvalidArgument("translation range is empty");
  }
  Rng rng(spec.seed);
  SampledTransform out;
  out.angles.rx = rng.uniform(0.0, spec.max_rotation_deg);
  out.angles.ry = rng.uniform(0.0, spec.max_rotation_deg);
  out.angles.rz = rng.uniform(0.0, spec.max_rotation_deg);
  Vec3 t;
  for (int i = 0; i < 3; ++i) t[i] = rng.uniform(spec.translation_low, spec.translation_high);
  out.transform = RigidTransform(euler_to_rotation(out.angles), t);
  return out;
}

PointCloud add_noise(const PointCloud& cloud, const NoiseSpec& spec) {
  if (!(spec.variance >= 0.0)) throw InvalidArgument("noise variance must be >= 0");
  if (spec.variance == 0.0) return cloud;
  const double sigma = std::sqrt(spec.variance);
  Rng rng(spec.seed);
  std::vector<Vec3> out(cloud.points().begin(), cloud.points().end());
  for (Vec3& p : out) {
    for (int d = 0; d < 3; ++d) p[d] += sigma * rng.gaussian();
  }
  return PointCloud(std::move(out));
}

MetricsReport compute_metrics(const std::vector<PoseSample>& ground_truth,
                              const std::vector<PoseSample>& estimates) {
  if (ground_truth.size() != estimates.size()) {
    throw InvalidArgument("compute_metrics: " + std::to_string(ground_truth.size()) +
                          " ground-truth poses vs " + std::to_string(estimates.size()) +
                          " estimates");
  }
  if (ground_truth.empty()) throw InvalidArgument("compute_metrics: no samples");
  MetricsReport m;
  double sq_r = 0.0, abs_r = 0.0, sq_t = 0.0, abs_t = 0.0;
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    const EulerAngles& g = ground_truth[i].angles;
    const EulerAngles& e = estimates[i].angles;
    const double err[3] = {wrap_degrees(e.rx - g.rx), wrap_degrees(e.ry - g.ry),
                           wrap_degrees(e.rz - g.rz)};
    double sample_r = 0.0, sample_t = 0.0;
    for (int a = 0; a < 3; ++a) {
      sq_r += err[a] * err[a];
      sample_r += std::abs(err[a]);
      const double dt = estimates[i].translation[a] - ground_truth[i].translation[a];
      sq_t += dt * dt;
      sample_t += std::abs(dt);
    }
    abs_r += sample_r;
    abs_t += sample_t;
    m.per_sample_mae_r.push_back(sample_r / 3.0);
    m.per_sample_mae_t.push_back(sample_t / 3.0);
  }
  const double count = 3.0 * static_cast<double>(ground_truth.size());
  m.mse_r = sq_r / count;
  m.rmse_r = std::sqrt(m.mse_r);
  m.mae_r = abs_r / count;
  m.mse_t = sq_t / count;
  m.rmse_t = std::sqrt(m.mse_t);
  m.mae_t = abs_t / count;
  return m;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty list");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  if (values.size() % 2 == 1) return values[mid];
  const double upper = values[mid];
  return 0.5 * (upper + *std::max_element(values.begin(), values.begin() + mid));
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Spa: return "spa";
    case Method::Icp: return "icp";
    case Method::SpaRandom: return "spa-random";
    case Method::SpaFps: return "spa-fps";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::Spa, Method::Icp, Method::SpaRandom, Method::SpaFps}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<CloudPair> make_pairs(const std::vector<NamedCloud>& clouds,
                                  std::uint64_t seed, bool permute) {
  std::vector<CloudPair> pairs;
  pairs.reserve(clouds.size());
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    const PointCloud& c = clouds[i].cloud;
    std::vector<std::size_t> perm(c.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(mix_seed(seed, i, 0x9e12));
    for (std::size_t k = perm.size(); permute && k > 1; --k) {
      std::swap(perm[k - 1], perm[rng.below(k)]);
    }
    pairs.push_back({clouds[i].name, c, c.subset(perm)});
  }
  return pairs;
}

SweepResult run_sweep(const std::vector<CloudPair>& dataset, const SweepSettings& settings,
                      const FeatureExtractor* extractor) {
  if (dataset.empty()) throw InvalidArgument("sweep dataset is empty");
  if (settings.methods.empty()) throw InvalidArgument("sweep needs at least one method");
  if (extractor == nullptr &&
      std::any_of(settings.methods.begin(), settings.methods.end(),
                  [](Method m) { return m != Method::Icp; })) {
    throw InvalidArgument("SPA methods need a trained feature extractor");
  }
  SweepResult result;
  const std::size_t n = dataset.size();
  const std::size_t n_methods = settings.methods.size();

  for (double angle : settings.max_angles_deg) {
    const auto angle_key = std::bit_cast<std::uint64_t>(angle);
    std::vector<SampledTransform> truth;
    std::vector<PointCloud> moved;
    truth.reserve(n);
    moved.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      TransformSpec spec{angle, settings.translation_low, settings.translation_high,
                         mix_seed(settings.seed, angle_key, i, 1)};
      truth.push_back(sample_transform(spec));
      PointCloud source = apply_transform(dataset[i].source, truth.back().transform);
      if (settings.noise_variance > 0.0) {
        source = add_noise(source, {settings.noise_variance,
                                    mix_seed(settings.seed, angle_key, i, 2)});
      }
      moved.push_back(std::move(source));
    }

    std::vector<Outcome> outcomes(n * n_methods);
    parallel_for(n * n_methods, settings.threads, [&](std::size_t task) {
      const std::size_t m = task / n;
      const std::size_t i = task % n;
      outcomes[task] = run_method(settings.methods[m], dataset[i].target, moved[i],
                                  settings, extractor,
                                  mix_seed(settings.seed, angle_key, i, 3));
    });

    for (std::size_t m = 0; m < n_methods; ++m) {
      std::vector<PoseSample> gt, est;
      std::vector<std::size_t> ok_index;
      std::size_t failed = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const Outcome& o = outcomes[m * n + i];
        if (!o.ok) {
          ++failed;
          continue;
        }
        gt.push_back({truth[i].angles, truth[i].transform.translation});
        est.push_back(o.estimate);
        ok_index.push_back(i);
      }
      SweepRow row;
      row.sample_index = std::move(ok_index);
      row.method = settings.methods[m];
      row.max_angle_deg = angle;
      if (!gt.empty()) row.report = compute_metrics(gt, est);
      row.report.failed = failed;
      result.rows.push_back(std::move(row));
    }
    result.ground_truth.push_back(std::move(truth));
  }
  return result;
}

Histogram histogram(const std::vector<double>& values, double bin_width_deg) {
  if (values.empty()) throw InvalidArgument("histogram of an empty list");
  if (!(bin_width_deg > 0.0)) throw InvalidArgument("histogram bin width must be > 0");
  std::size_t top = 0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("histogram values must be finite and nonnegative");
    }
    top = std::max(top, static_cast<std::size_t>(std::floor(v / bin_width_deg)));
  }
  Histogram h;
  h.bins.resize(top + 1);
  for (std::size_t b = 0; b <= top; ++b) {
    h.bins[b].low = static_cast<double>(b) * bin_width_deg;
    h.bins[b].high = static_cast<double>(b + 1) * bin_width_deg;
  }
  std::size_t below1 = 0, below5 = 0;
  for (double v : values) {
    ++h.bins[static_cast<std::size_t>(std::floor(v / bin_width_deg))].count;
    if (v < 1.0) ++below1;
    if (v < 5.0) ++below5;
  }
  const auto n = static_cast<double>(values.size());
  h.fraction_below_1deg = static_cast<double>(below1) / n;
  h.fraction_below_5deg = static_cast<double>(below5) / n;
  return h;
}

}  // namespace spa
