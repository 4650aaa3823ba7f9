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

#include "spa/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spa/cloud_io.hpp"
#include "spa/error.hpp"
#include "spa/evaluation.hpp"
#include "spa/model_io.hpp"
#include "spa/run_config.hpp"
#include "spa/saliency.hpp"
#include "spa/shapes.hpp"

namespace spa {
namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::string data;
  std::optional<std::uint64_t> suite_seed;
  std::string model;
  std::string out;
  // register
  std::string target, source, method = "spa";
  std::optional<std::size_t> iters, salient;
  // saliency
  std::string cloud;
  // benchmark
  std::string angles, methods, hist_out, label_out;
  std::optional<double> noise_var;
  std::optional<std::uint64_t> seed;
  std::optional<double> bin_width;
  bool keep_order = false;
  // synth
  std::string kind;
  std::size_t n = 1024;
  double variant = 0.0;
};

RunConfig base_config(const Flags& f) {
  return f.config.empty() ? RunConfig{} : load_run_config(f.config);
}

std::size_t thread_count(const RunConfig& cfg) {
  if (const char* env = std::getenv("SPA_THREADS")) {
    try {
      const double v = parse_double(env);
      if (v >= 0 && v == std::floor(v)) return static_cast<std::size_t>(v);
    } catch (const DataError&) {
    }
    throw UsageError(std::string("SPA_THREADS must be a nonnegative integer, got '") + env + "'");
  }
  return cfg.threads;
}

fs::path required_path(const std::string& flag, const std::optional<fs::path>& from_config,
                       const char* name) {
  if (!flag.empty()) return flag;
  if (from_config) return *from_config;
  throw UsageError(std::string("missing --") + name);
}

std::vector<NamedCloud> load_dataset(const Flags& f, const RunConfig& cfg) {
  const std::size_t n = cfg.subsample_to == 0 ? 1024 : cfg.subsample_to;
  if (f.suite_seed) {
    if (!f.data.empty()) throw UsageError("--data and --suite-seed are exclusive");
    return synthetic_suite(n, *f.suite_seed);
  }
  const fs::path dir = required_path(f.data, cfg.data, "data");
  std::optional<std::size_t> keep;
  if (cfg.subsample_to != 0) keep = cfg.subsample_to;
  std::vector<NamedCloud> clouds;
  for (const CloudFile& file : list_cloud_files(dir)) {
    std::string name = file.path.stem().string();
    if (file.label) name = *file.label + "/" + name;
    clouds.push_back({name, load_cloud(file, keep)});
  }
  if (clouds.empty()) throw DataError("no cloud files under " + dir.string());
  return clouds;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw DataError("write failed: " + path.string());
}

std::string join(std::initializer_list<std::string> fields) {
  std::string s;
  for (const std::string& f : fields) s += (s.empty() ? "" : ",") + f;
  return s;
}

std::string num(double v) { return format_double(v); }
std::string num(std::size_t v) { return std::to_string(v); }

int run_train(const Flags& f, std::ostream& out) {
  RunConfig cfg = base_config(f);
  const fs::path model_path = required_path(f.out, cfg.model, "out");
  const auto dataset = load_dataset(f, cfg);
  std::vector<PointCloud> clouds;
  for (const NamedCloud& c : dataset) clouds.push_back(c.cloud);
  const auto start = std::chrono::steady_clock::now();
  const FeatureExtractor extractor = train_feature_extractor(clouds, cfg.hop);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  save_model(extractor, model_path);
  out << "trained on " << clouds.size() << " clouds in " << seconds << " s; feature_dim "
      << extractor.feature_dim() << "; " << fs::file_size(model_path) << " bytes written to "
      << model_path.string() << "\n";
  return kExitOk;
}

void write_transform_row(std::ofstream& csv, const std::string& kind, std::size_t iteration,
                         const RigidTransform& t, double residual) {
  const EulerAngles e = rotation_to_euler(t.rotation).angles;
  std::string row = kind + "," + num(iteration) + "," + num(e.rx) + "," + num(e.ry) + "," +
                    num(e.rz) + "," + num(t.translation.x()) + "," + num(t.translation.y()) +
                    "," + num(t.translation.z()) + "," + num(residual);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) row += "," + num(t.rotation(r, c));
  }
  csv << row << "\n";
}

int run_register(const Flags& f, std::ostream& out) {
  RunConfig cfg = base_config(f);
  if (f.iters) {
    cfg.spa.iterations = *f.iters;
    cfg.icp.iterations = *f.iters;
  }
  if (f.salient) cfg.spa.salient_points = *f.salient;
  const auto method = parse_method(f.method);
  if (!method || (*method != Method::Spa && *method != Method::Icp)) {
    throw UsageError("--method must be spa or icp");
  }
  const fs::path out_path = required_path(f.out, cfg.out, "out");
  const PointCloud target = load_cloud(fs::path(f.target));
  const PointCloud source = load_cloud(fs::path(f.source));
  RegistrationResult r;
  if (*method == Method::Icp) {
    r = register_icp(target, source, cfg.icp);
  } else {
    const FeatureExtractor extractor = load_model(required_path(f.model, cfg.model, "model"));
    r = register_spa(target, source, extractor, cfg.spa);
  }

  std::ofstream csv = open_output(out_path);
  csv << "record,iteration,rx_deg,ry_deg,rz_deg,tx,ty,tz,residual_rmse,"
         "r00,r01,r02,r10,r11,r12,r20,r21,r22\n";
  for (std::size_t i = 0; i < r.per_iteration.size(); ++i) {
    const IterationRecord& it = r.per_iteration[i];
    write_transform_row(csv, "increment", i + 1, it.increment, it.residual_rmse);
  }
  const double last = r.per_iteration.empty() ? 0.0 : r.per_iteration.back().residual_rmse;
  write_transform_row(csv, "final", r.iterations_run, r.transform, last);
  finish(csv, out_path);

  const EulerAngles e = rotation_to_euler(r.transform.rotation).angles;
  out << "iterations " << r.iterations_run << (r.converged ? " (converged)" : "")
      << "; euler deg " << e.rx << " " << e.ry << " " << e.rz << "; translation "
      << r.transform.translation.transpose() << "\n";
  if (r.residual_increased) out << "note: the residual increased in some iteration\n";
  if (r.degenerate) throw DegenerateGeometry("registration hit degenerate correspondences");
  return kExitOk;
}

int run_saliency(const Flags& f, std::ostream& out) {
  RunConfig cfg = base_config(f);
  if (f.salient) cfg.spa.salient_points = *f.salient;
  const fs::path out_path = required_path(f.out, cfg.out, "out");
  const PointCloud cloud = load_cloud(fs::path(f.cloud));
  const SaliencyField field = local_curvature_energies(cloud, cfg.spa.saliency_k);
  const SalientSet set =
      select_salient_points(cloud, field, cfg.spa.salient_points, cfg.spa.pool_fraction);
  std::ofstream csv = open_output(out_path);
  csv << "index,x,y,z,lambda\n";
  for (std::size_t i = 0; i < set.indices.size(); ++i) {
    const Vec3& p = cloud[set.indices[i]];
    csv << join({num(set.indices[i]), num(p.x()), num(p.y()), num(p.z()),
                 num(set.lambdas[i])})
        << "\n";
  }
  finish(csv, out_path);
  out << set.indices.size() << " salient points written to " << out_path.string() << "\n";
  return kExitOk;
}

int run_benchmark(const Flags& f, std::ostream& out) {
  RunConfig cfg = base_config(f);
  if (!f.angles.empty()) cfg.angles_deg = parse_angle_range(f.angles);
  if (!f.methods.empty()) cfg.methods = parse_method_list(f.methods);
  if (f.noise_var) cfg.noise_variance = *f.noise_var;
  if (f.seed) cfg.seed = *f.seed;
  if (f.iters) cfg.spa.iterations = *f.iters;
  if (f.salient) cfg.spa.salient_points = *f.salient;
  if (f.bin_width) cfg.histogram_bin_deg = *f.bin_width;
  if (!(cfg.noise_variance >= 0.0)) throw UsageError("--noise-var must be >= 0");
  if (!(cfg.histogram_bin_deg > 0.0)) throw UsageError("--bin-width must be > 0");
  for (double a : cfg.angles_deg) {
    if (!(a >= 0.0 && a < 180.0)) throw UsageError("angles must lie in [0, 180)");
  }
  const fs::path out_path = required_path(f.out, cfg.out, "out");

  std::optional<FeatureExtractor> extractor;
  const bool needs_model = std::any_of(cfg.methods.begin(), cfg.methods.end(),
                                       [](Method m) { return m != Method::Icp; });
  if (needs_model) extractor = load_model(required_path(f.model, cfg.model, "model"));
  const auto clouds = load_dataset(f, cfg);

  SweepSettings s;
  s.methods = cfg.methods;
  s.max_angles_deg = cfg.angles_deg;
  s.translation_low = cfg.translation_low;
  s.translation_high = cfg.translation_high;
  s.noise_variance = cfg.noise_variance;
  s.seed = cfg.seed;
  s.spa = cfg.spa;
  s.icp = cfg.icp;
  s.threads = thread_count(cfg);
  if (f.keep_order) cfg.permute_source = false;
  const auto pairs = make_pairs(clouds, cfg.seed, cfg.permute_source);
  const SweepResult result = run_sweep(pairs, s, extractor ? &*extractor : nullptr);

  std::ofstream csv = open_output(out_path);
  csv << "method,max_angle_deg,samples,failed,mse_r,rmse_r,mae_r,mse_t,rmse_t,mae_t,"
         "median_mae_r,median_mae_t,fraction_below_1deg,fraction_below_5deg\n";
  for (const SweepRow& row : result.rows) {
    const MetricsReport& m = row.report;
    const std::size_t ok = m.per_sample_mae_r.size();
    double med_r = 0, med_t = 0, below1 = 0, below5 = 0;
    if (ok > 0) {
      med_r = median(m.per_sample_mae_r);
      med_t = median(m.per_sample_mae_t);
      const Histogram h = histogram(m.per_sample_mae_r, cfg.histogram_bin_deg);
      below1 = h.fraction_below_1deg;
      below5 = h.fraction_below_5deg;
    }
    csv << join({std::string(to_string(row.method)), num(row.max_angle_deg), num(ok + m.failed),
                 num(m.failed), num(m.mse_r), num(m.rmse_r), num(m.mae_r), num(m.mse_t),
                 num(m.rmse_t), num(m.mae_t), num(med_r), num(med_t), num(below1),
                 num(below5)})
        << "\n";
    out << to_string(row.method) << " @ " << row.max_angle_deg << " deg: MAE(R) " << m.mae_r
        << ", MAE(t) " << m.mae_t << ", failed " << m.failed << "\n";
  }
  finish(csv, out_path);

  if (!f.hist_out.empty()) {
    std::ofstream hist = open_output(f.hist_out);
    hist << "method,max_angle_deg,bin_low_deg,bin_high_deg,count\n";
    for (const SweepRow& row : result.rows) {
      if (row.report.per_sample_mae_r.empty()) continue;
      for (const HistogramBin& b : histogram(row.report.per_sample_mae_r, cfg.histogram_bin_deg).bins) {
        hist << join({std::string(to_string(row.method)), num(row.max_angle_deg), num(b.low),
                      num(b.high), num(b.count)})
             << "\n";
      }
    }
    finish(hist, f.hist_out);
  }

  if (!f.label_out.empty()) {
    std::ofstream by_label = open_output(f.label_out);
    by_label << "method,max_angle_deg,label,samples,mean_mae_r,median_mae_r,mean_mae_t\n";
    for (const SweepRow& row : result.rows) {
      // Labels are the cloud names up to the first '/', if any.
      std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
      for (std::size_t j = 0; j < row.sample_index.size(); ++j) {
        const std::string& name = pairs[row.sample_index[j]].label;
        auto& g = groups[name.substr(0, name.find('/'))];
        g.first.push_back(row.report.per_sample_mae_r[j]);
        g.second.push_back(row.report.per_sample_mae_t[j]);
      }
      for (const auto& [label, g] : groups) {
        double sum_r = 0, sum_t = 0;
        for (double v : g.first) sum_r += v;
        for (double v : g.second) sum_t += v;
        const auto k = static_cast<double>(g.first.size());
        by_label << join({std::string(to_string(row.method)), num(row.max_angle_deg), label,
                          num(g.first.size()), num(sum_r / k), num(median(g.first)),
                          num(sum_t / k)})
                 << "\n";
      }
    }
    finish(by_label, f.label_out);
  }
  return kExitOk;
}

int run_synth(const Flags& f, std::ostream& out) {
  const auto kind = parse_shape_kind(f.kind);
  if (!kind) throw UsageError("unknown shape kind '" + f.kind + "'");
  if (f.n < 64) throw UsageError("--n must be at least 64");
  if (!(f.variant >= 0.0 && f.variant <= 1.0)) throw UsageError("--variant must lie in [0, 1]");
  const fs::path path(f.out);
  const auto format = format_from_extension(path);
  if (!format) throw UsageError("cannot infer a cloud format from " + f.out);
  write_cloud(generate_shape(*kind, f.n, f.seed.value_or(0), f.variant), path, *format);
  out << f.n << " points written to " << f.out << "\n";
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Salient-point registration of 3D point clouds"};
  app.require_subcommand(1);
  Flags f;

  auto* train = app.add_subcommand("train", "train a feature extractor on a directory of clouds");
  train->add_option("--data", f.data, "directory of cloud files (searched recursively)");
  train->add_option("--suite-seed", f.suite_seed, "train on the built-in synthetic suite instead");
  train->add_option("--config", f.config, "JSON run configuration");
  train->add_option("--out", f.out, "model file to write");

  auto* reg = app.add_subcommand("register", "register a source cloud onto a target cloud");
  reg->add_option("--model", f.model, "trained model (spa method)");
  reg->add_option("--target", f.target, "target cloud")->required();
  reg->add_option("--source", f.source, "source cloud")->required();
  reg->add_option("--method", f.method, "spa or icp");
  reg->add_option("--iters", f.iters, "iteration count");
  reg->add_option("--salient", f.salient, "salient points per cloud");
  reg->add_option("--config", f.config, "JSON run configuration");
  reg->add_option("--out", f.out, "result CSV");

  auto* sal = app.add_subcommand("saliency", "write the salient points of a cloud");
  sal->add_option("--model", f.model, "accepted for symmetry; saliency needs no model");
  sal->add_option("--cloud", f.cloud, "input cloud")->required();
  sal->add_option("--salient", f.salient, "number of salient points");
  sal->add_option("--config", f.config, "JSON run configuration");
  sal->add_option("--out", f.out, "output CSV");

  auto* bench = app.add_subcommand("benchmark", "sweep registration accuracy over angles");
  bench->add_option("--model", f.model, "trained model (SPA methods)");
  bench->add_option("--data", f.data, "directory of cloud files");
  bench->add_option("--suite-seed", f.suite_seed, "use the built-in synthetic suite instead");
  bench->add_option("--angles", f.angles, "max angles, start:stop:step (inclusive)");
  bench->add_option("--noise-var", f.noise_var, "Gaussian noise variance on the source");
  bench->add_option("--seed", f.seed, "seed of motions, noise and random selection");
  bench->add_option("--methods", f.methods, "comma list of spa, icp, spa-random, spa-fps");
  bench->add_option("--iters", f.iters, "SPA iteration count");
  bench->add_option("--salient", f.salient, "salient points per cloud");
  bench->add_option("--bin-width", f.bin_width, "histogram bin width in degrees");
  bench->add_flag("--keep-order", f.keep_order, "do not shuffle the source point order");
  bench->add_option("--config", f.config, "JSON run configuration");
  bench->add_option("--out", f.out, "report CSV");
  bench->add_option("--hist-out", f.hist_out, "histogram CSV of per-sample MAE(R)");
  bench->add_option("--label-out", f.label_out, "per-label summary CSV");

  auto* synth = app.add_subcommand("synth", "write a synthetic shape");
  synth->add_option("--kind", f.kind, "l-bracket, stepped-block, notched-cylinder, cube, plane")
      ->required();
  synth->add_option("--n", f.n, "point count (>= 64)");
  synth->add_option("--seed", f.seed, "sampling seed");
  synth->add_option("--variant", f.variant, "proportion morph in [0, 1]");
  synth->add_option("--out", f.out, "output file; format from the extension")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) return run_train(f, out);
    if (reg->parsed()) return run_register(f, out);
    if (sal->parsed()) return run_saliency(f, out);
    if (bench->parsed()) return run_benchmark(f, out);
    return run_synth(f, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DegenerateGeometry& e) {
    err << "degenerate geometry: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int cli_main(int argc, const char* const* argv) {
  return cli_main(argc, argv, std::cout, std::cerr);
}

}  // namespace spa
