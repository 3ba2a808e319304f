// tools/orbitsig-main.cc

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "orbitsig/classifier.h"
#include "orbitsig/pipeline.h"
#include "orbitsig/pooling.h"
#include "orbitsig/synth.h"
#include "orbitsig/template-bank.h"
#include "orbitsig/transforms.h"
#include "orbitsig/util.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace orbitsig;

namespace {

struct ClassifierSettings {
  double lambda = 1.0;
  bool lambda_grid = false;
};

struct Experiment {
  std::string manifest_path;
  std::string out_dir = "out";
  std::string cache_dir;  // empty: $ORBITSIG_CACHE_DIR or <out_dir>/cache
  PipelineConfig pipeline;
  ClassifierSettings classifier;
  SynthConfig synth;
};

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string stage;
  std::optional<uint64_t> seed;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config_path, "experiment config JSON");
  if (config_required) opt->required();
  cmd->add_option("--seed", flags.seed, "override all seeds (split, templates, synth)");
  cmd->add_option("--stage", flags.stage,
                  "pipeline stage: base|warp|warp+translation|warp+translation+pitch");
  cmd->add_option("--out", flags.out_dir, "output directory (overrides config)");
  cmd->add_option("--jobs", flags.jobs, "worker threads for per-track work")
      ->check(CLI::PositiveNumber);
}

Experiment load_experiment(const CommonFlags& flags) {
  Experiment exp;
  if (!flags.config_path.empty()) {
    json j;
    try {
      j = json::parse(read_file_bytes(flags.config_path));
    } catch (const json::exception& e) {
      throw ConfigError("cannot parse config " + flags.config_path + ": " + e.what());
    }
    if (j.value("version", 1) != 1) throw ConfigError("config: unsupported schema version");
    exp.manifest_path = j.value("manifest", "");
    exp.out_dir = j.value("out_dir", exp.out_dir);
    exp.cache_dir = j.value("cache_dir", "");
    if (j.contains("pipeline")) exp.pipeline = PipelineConfig::from_json(j["pipeline"]);
    if (j.contains("classifier")) {
      exp.classifier.lambda = j["classifier"].value("lambda", 1.0);
      exp.classifier.lambda_grid = j["classifier"].value("lambda_grid", false);
    }
    if (j.contains("synth")) {
      const auto& s = j["synth"];
      exp.synth.classes = s.value("classes", exp.synth.classes);
      exp.synth.tracks_per_class = s.value("tracks_per_class", exp.synth.tracks_per_class);
      exp.synth.duration_s = s.value("duration_s", exp.synth.duration_s);
      exp.synth.sample_rate = s.value("sample_rate", exp.synth.sample_rate);
      exp.synth.snr_db = s.value("snr_db", exp.synth.snr_db);
      exp.synth.warp_jitter = s.value("warp_jitter", exp.synth.warp_jitter);
      exp.synth.pitch_jitter_semitones =
          s.value("pitch_jitter_semitones", exp.synth.pitch_jitter_semitones);
    }
    // Manifest paths are resolved relative to the config file.
    if (!exp.manifest_path.empty() && fs::path(exp.manifest_path).is_relative()) {
      exp.manifest_path = (fs::path(flags.config_path).parent_path() / exp.manifest_path).string();
    }
  }
  if (!flags.out_dir.empty()) exp.out_dir = flags.out_dir;
  if (flags.seed) {
    exp.pipeline.seeds.split = *flags.seed;
    exp.pipeline.seeds.templates = *flags.seed;
    exp.pipeline.seeds.synth = *flags.seed;
  }
  if (!flags.stage.empty() && flags.stage != "all") {
    exp.pipeline = exp.pipeline.for_stage(stage_from_name(flags.stage));
  }
  exp.synth.seed = exp.pipeline.seeds.synth;
  if (exp.cache_dir.empty()) {
    const char* env = std::getenv("ORBITSIG_CACHE_DIR");
    exp.cache_dir = env != nullptr && *env != '\0'
                        ? std::string(env)
                        : (fs::path(exp.out_dir) / "cache").string();
  }
  exp.pipeline.validate();
  return exp;
}

DatasetManifest require_manifest(const Experiment& exp) {
  if (exp.manifest_path.empty()) {
    throw ConfigError("this command needs a dataset: set \"manifest\" in the config");
  }
  return read_manifest(exp.manifest_path);
}

std::string warp_bank_path(const Experiment& exp) {
  return (fs::path(exp.out_dir) / "banks" / "warp.tbk").string();
}
std::string pitch_bank_path(const Experiment& exp) {
  return (fs::path(exp.out_dir) / "banks" / "pitch.tbk").string();
}

FeaturePipeline make_pipeline(const Experiment& exp) {
  const std::string hash = exp.pipeline.config_hash();
  std::optional<TemplateBank> warp_bank, pitch_bank;
  if (exp.pipeline.warp.enabled) {
    const std::string path = warp_bank_path(exp);
    if (!fs::exists(path)) {
      throw ConfigError("warp bank not found at " + path + " (run build-banks first)");
    }
    warp_bank = load_bank(path, hash);
  }
  if (exp.pipeline.pitch.enabled) {
    const std::string path = pitch_bank_path(exp);
    if (!fs::exists(path)) {
      throw ConfigError("pitch bank not found at " + path + " (run build-banks first)");
    }
    pitch_bank = load_bank(path, hash);
  }
  return FeaturePipeline(exp.pipeline, std::move(warp_bank), std::move(pitch_bank));
}

std::mutex g_log_mutex;

void log_line(const std::string& line) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::cout << line << "\n";
}

// Runs fn(i) for i in [0, n) on `jobs` threads. Exceptions are rethrown on
// the caller thread.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (jobs == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

Eigen::MatrixXd features_for(const Experiment& exp, const FeaturePipeline& pipeline,
                             const ManifestEntry& entry, bool use_cache, bool* cache_hit) {
  const std::string stage = stage_name(pipeline.config().deepest_stage());
  const std::string hash = pipeline.config().config_hash();
  if (use_cache) {
    auto cached = read_cached_features(exp.cache_dir, entry.track_id, stage, hash);
    if (cached) {
      if (cache_hit) *cache_hit = true;
      return *cached;
    }
  }
  if (cache_hit) *cache_hit = false;
  const AudioClip clip = load_clip(entry, exp.pipeline.base);
  const FeatureSequence seq = pipeline.extract(clip);
  if (use_cache) write_cached_features(exp.cache_dir, entry.track_id, seq, pipeline.config());
  return seq.rows;
}

int cmd_synth(const CommonFlags& flags) {
  Experiment exp = load_experiment(flags);
  const DatasetManifest manifest = generate_synth_corpus(exp.out_dir, exp.synth);
  log_line("synth: wrote " + std::to_string(manifest.entries.size()) + " tracks (" +
           std::to_string(exp.synth.classes) + " classes x " +
           std::to_string(exp.synth.tracks_per_class) + ") to " + exp.out_dir);
  log_line("synth: manifest at " + (fs::path(exp.out_dir) / "manifest.csv").string());
  return 0;
}

int cmd_build_banks(const CommonFlags& flags) {
  Experiment exp = load_experiment(flags);
  const DatasetManifest manifest = require_manifest(exp);
  auto [train, test] = split_dataset(manifest, exp.pipeline.train_fraction,
                                     exp.pipeline.seeds.split);
  (void)test;
  fs::create_directories(fs::path(exp.out_dir) / "banks");

  if (!exp.pipeline.warp.enabled) {
    log_line("build-banks: no invariance layers enabled, nothing to build");
    return 0;
  }
  TemplateBank warp_bank = build_warp_bank(train, exp.pipeline);
  save_bank(warp_bank_path(exp), warp_bank);
  log_line("build-banks: warp bank K=" + std::to_string(warp_bank.orbit_count()) +
           " M=" + std::to_string(warp_bank.members_per_orbit()) +
           " d=" + std::to_string(warp_bank.dim()) + " -> " + warp_bank_path(exp));

  if (exp.pipeline.pitch.enabled) {
    TemplateBank pitch_bank = build_pitch_bank(train, exp.pipeline, warp_bank);
    save_bank(pitch_bank_path(exp), pitch_bank);
    log_line("build-banks: pitch bank K=" + std::to_string(pitch_bank.orbit_count()) +
             " M=" + std::to_string(pitch_bank.members_per_orbit()) +
             " d=" + std::to_string(pitch_bank.dim()) + " -> " + pitch_bank_path(exp));
  }
  log_line("build-banks: config hash " + exp.pipeline.config_hash());
  return 0;
}

int cmd_extract(const CommonFlags& flags) {
  Experiment exp = load_experiment(flags);
  const DatasetManifest manifest = require_manifest(exp);
  const FeaturePipeline pipeline = make_pipeline(exp);
  const std::string stage = stage_name(exp.pipeline.deepest_stage());

  std::atomic<int> hits{0}, computed{0};
  parallel_for(manifest.entries.size(), flags.jobs, [&](size_t i) {
    const auto& entry = manifest.entries[i];
    bool cache_hit = false;
    const Eigen::MatrixXd rows = features_for(exp, pipeline, entry, /*use_cache=*/true, &cache_hit);
    if (cache_hit) {
      ++hits;
      const auto path = feature_cache_path(exp.cache_dir, entry.track_id, stage);
      const auto mtime = fs::last_write_time(path).time_since_epoch().count();
      log_line("extract: cache hit " + entry.track_id + " (mtime " + std::to_string(mtime) +
               ", hash " + pipeline.config().config_hash().substr(0, 12) + ")");
    } else {
      ++computed;
      log_line("extract: " + entry.track_id + " -> " + std::to_string(rows.rows()) + " x " +
               std::to_string(rows.cols()));
    }
  });
  log_line("extract: stage " + stage + ", " + std::to_string(computed.load()) + " computed, " +
           std::to_string(hits.load()) + " cache hits, cache dir " + exp.cache_dir);
  return 0;
}

EvalReport eval_stage(const Experiment& exp_in, Stage stage, int jobs) {
  Experiment exp = exp_in;
  exp.pipeline = exp.pipeline.for_stage(stage);
  const DatasetManifest manifest = require_manifest(exp);
  auto [train, test] = split_dataset(manifest, exp.pipeline.train_fraction,
                                     exp.pipeline.seeds.split);
  const FeaturePipeline pipeline = make_pipeline(exp);

  // Warm the cache in parallel, then evaluate off the cache.
  parallel_for(manifest.entries.size(), jobs, [&](size_t i) {
    features_for(exp, pipeline, manifest.entries[i], /*use_cache=*/true, nullptr);
  });
  TrackFeatureFn features = [&](const ManifestEntry& entry) {
    return features_for(exp, pipeline, entry, /*use_cache=*/true, nullptr);
  };

  double lambda = exp.classifier.lambda;
  if (exp.classifier.lambda_grid) {
    // Gather training frames once for CV.
    std::vector<Eigen::MatrixXd> mats;
    Eigen::Index rows = 0;
    for (const auto& e : train.entries) {
      mats.push_back(features(e));
      rows += mats.back().rows();
    }
    Eigen::MatrixXd X(rows, mats.front().cols());
    std::vector<int> y(rows);
    Eigen::Index at = 0;
    for (size_t i = 0; i < mats.size(); ++i) {
      X.middleRows(at, mats[i].rows()) = mats[i];
      std::fill_n(y.begin() + at, mats[i].rows(), train.entries[i].label);
      at += mats[i].rows();
    }
    const std::vector<double> grid = {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
    lambda = select_lambda_cv(X, y, static_cast<int>(train.class_names.size()), grid, 5,
                              exp.pipeline.seeds.split);
    log_line("eval: cross-validated lambda = " + std::to_string(lambda));
  }

  json summary = {{"stage", stage_name(stage)},
                  {"config_hash", exp.pipeline.config_hash()},
                  {"split_seed", exp.pipeline.seeds.split},
                  {"lambda", lambda},
                  {"pipeline", exp.pipeline.to_json()}};
  return evaluate(train, test, features, lambda, summary);
}

int cmd_eval(const CommonFlags& flags) {
  Experiment exp = load_experiment(flags);
  fs::create_directories(exp.out_dir);

  std::vector<Stage> stages;
  if (flags.stage == "all") {
    stages = {Stage::Base, Stage::Warp, Stage::WarpTranslation, Stage::WarpTranslationPitch};
  } else {
    stages = {exp.pipeline.deepest_stage()};
  }

  std::string summary_table = "stage                        frame err %   track err %\n";
  for (Stage stage : stages) {
    const EvalReport report = eval_stage(exp, stage, flags.jobs);
    const std::string tag = stage_name(stage);
    write_file_bytes((fs::path(exp.out_dir) / ("report-" + tag + ".json")).string(),
                     report.to_json().dump(2) + "\n");
    write_file_bytes((fs::path(exp.out_dir) / ("report-" + tag + ".txt")).string(),
                     report.to_text_table());
    write_file_bytes((fs::path(exp.out_dir) / ("frames-" + tag + ".csv")).string(),
                     report.frame_csv());
    char row[160];
    std::snprintf(row, sizeof(row), "%-28s %10.2f %13.2f\n", tag.c_str(),
                  report.frame_error_rate * 100.0, report.track_error_rate * 100.0);
    summary_table += row;
    log_line("eval: " + tag + " frame err " + std::to_string(report.frame_error_rate * 100.0) +
             "%, track err " + std::to_string(report.track_error_rate * 100.0) + "%");
  }
  write_file_bytes((fs::path(exp.out_dir) / "summary.txt").string(), summary_table);
  log_line("eval: reports in " + exp.out_dir);
  return 0;
}

// Exact cyclic-shift invariance on full-rotation orbit banks, plus a
// truncated-orbit negative control and the warp contrast measurement.
int cmd_invariance_test(const CommonFlags& flags) {
  Experiment exp = load_experiment(flags);
  fs::create_directories(exp.out_dir);
  json report;
  bool ok = true;

  const int dim = 64, n_orbits = 16, n_inputs = 100;
  TransformSpec full_spec = shift_grid(0, dim - 1, 1, TransformKind::CyclicShift);
  Rng rng(splitmix64(exp.pipeline.seeds.templates ^ 0x1181aaceULL));
  auto random_unit = [&rng, dim]() {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    return Eigen::VectorXd(v / v.norm());
  };

  TemplateBank full_bank, half_bank;
  full_bank.layer_tag = half_bank.layer_tag = "cyclic-test";
  full_bank.config_hash = half_bank.config_hash = exp.pipeline.config_hash();
  TransformSpec half_spec = shift_grid(0, dim / 2 - 1, 1, TransformKind::CyclicShift);
  for (int k = 0; k < n_orbits; ++k) {
    const Eigen::VectorXd t = random_unit();
    TemplateOrbit full = build_orbit(t, full_spec);
    full.template_id = k;
    TemplateOrbit half = build_orbit(t, half_spec);
    half.template_id = k;
    full_bank.orbits.push_back(std::move(full));
    half_bank.orbits.push_back(std::move(half));
  }

  const std::vector<PoolingSpec> poolings = {PoolingSpec::moments({1, 2, 3}),
                                             PoolingSpec::sigmoid_cdf(20)};
  double max_dev_full = 0.0, max_dev_half = 0.0;
  for (int i = 0; i < n_inputs; ++i) {
    const Eigen::VectorXd x = random_unit();
    const std::vector<double> xv(x.data(), x.data() + dim);
    const long long shift = static_cast<long long>(rng.uniform_index(dim - 1)) + 1;
    const auto gx = cyclic_shift(xv, shift);
    const Eigen::VectorXd gxe = Eigen::Map<const Eigen::VectorXd>(gx.data(), dim);
    for (const auto& pooling : poolings) {
      const auto s0 = signature(x, full_bank, pooling);
      const auto s1 = signature(gxe, full_bank, pooling);
      max_dev_full = std::max(max_dev_full, (s0.values - s1.values).cwiseAbs().maxCoeff());
      const auto h0 = signature(x, half_bank, pooling);
      const auto h1 = signature(gxe, half_bank, pooling);
      max_dev_half = std::max(max_dev_half, (h0.values - h1.values).cwiseAbs().maxCoeff());
    }
  }
  const bool full_ok = max_dev_full <= 1e-9;
  const bool half_violates = max_dev_half > 1e-9;
  report["cyclic_full_orbit_max_deviation"] = max_dev_full;
  report["cyclic_full_orbit_pass"] = full_ok;
  report["cyclic_truncated_orbit_max_deviation"] = max_dev_half;
  report["cyclic_truncated_orbit_violation_detected"] = half_violates;
  log_line("invariance-test: full cyclic orbit max deviation " + std::to_string(max_dev_full) +
           (full_ok ? " (pass, <= 1e-9)" : " (FAIL, > 1e-9)"));
  log_line("invariance-test: truncated orbit max deviation " + std::to_string(max_dev_half) +
           (half_violates ? " (violation detected, as expected)" : " (FAIL: no violation seen)"));
  ok = ok && full_ok && half_violates;

  // Warp median-contrast on the configured corpus, base layer vs warp layer.
  if (!exp.manifest_path.empty()) {
    const DatasetManifest manifest = require_manifest(exp);
    Experiment base_exp = exp;
    base_exp.pipeline = exp.pipeline.for_stage(Stage::Base);
    Experiment warp_exp = exp;
    warp_exp.pipeline = exp.pipeline.for_stage(Stage::Warp);
    const FeaturePipeline base_pipe = make_pipeline(base_exp);
    const FeaturePipeline warp_pipe = make_pipeline(warp_exp);

    const std::vector<double> eps_set = {-0.2, -0.1, 0.1, 0.2};
    const size_t n_tracks = std::min<size_t>(manifest.entries.size(), 16);
    auto dist = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
      const Eigen::Index rows = std::min(a.rows(), b.rows());
      return std::sqrt((a.topRows(rows) - b.topRows(rows)).squaredNorm() /
                       static_cast<double>(rows * a.cols()));
    };
    auto median = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      return v.empty() ? 0.0 : v[v.size() / 2];
    };

    std::vector<Eigen::MatrixXd> base_feats(n_tracks), warp_feats(n_tracks);
    std::vector<int> labels(n_tracks);
    std::vector<double> base_warp_d, warp_warp_d;
    for (size_t i = 0; i < n_tracks; ++i) {
      const auto& entry = manifest.entries[i];
      labels[i] = entry.label;
      const AudioClip clip = load_clip(entry, exp.pipeline.base);
      base_feats[i] = base_pipe.extract(clip).rows;
      warp_feats[i] = warp_pipe.extract(clip).rows;
      for (double eps : eps_set) {
        AudioClip warped = clip;
        warped.samples = time_warp(clip.samples, eps);
        base_warp_d.push_back(dist(base_feats[i], base_pipe.extract(warped).rows));
        warp_warp_d.push_back(dist(warp_feats[i], warp_pipe.extract(warped).rows));
      }
    }
    std::vector<double> base_inter, warp_inter;
    for (size_t i = 0; i < n_tracks; ++i) {
      for (size_t j = i + 1; j < n_tracks; ++j) {
        if (labels[i] == labels[j]) continue;
        base_inter.push_back(dist(base_feats[i], base_feats[j]));
        warp_inter.push_back(dist(warp_feats[i], warp_feats[j]));
      }
    }
    if (base_inter.empty()) {
      log_line("invariance-test: corpus too small for the warp contrast (one class); skipped");
    } else {
      const double base_ratio = median(base_warp_d) / median(base_inter);
      const double warp_ratio = median(warp_warp_d) / median(warp_inter);
      const bool contrast_ok = warp_ratio < base_ratio;
      report["warp_contrast_base"] = base_ratio;
      report["warp_contrast_warp_layer"] = warp_ratio;
      report["warp_contrast_pass"] = contrast_ok;
      log_line("invariance-test: warp contrast base " + std::to_string(base_ratio) +
               " vs warp layer " + std::to_string(warp_ratio) +
               (contrast_ok ? " (pass)" : " (FAIL)"));
      ok = ok && contrast_ok;
    }
  } else {
    log_line("invariance-test: no manifest configured; warp contrast suite skipped");
  }

  write_file_bytes((fs::path(exp.out_dir) / "invariance-report.json").string(),
                   report.dump(2) + "\n");
  log_line(std::string("invariance-test: ") + (ok ? "PASS" : "FAIL"));
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbit-signature audio features: template banks, invariant feature extraction, "
               "and genre-classification evaluation"};
  app.require_subcommand(1);

  CommonFlags synth_flags, banks_flags, extract_flags, eval_flags, inv_flags;
  auto* synth_cmd = app.add_subcommand("synth", "generate the procedural benchmark corpus");
  add_common_flags(synth_cmd, synth_flags, /*config_required=*/false);
  auto* banks_cmd = app.add_subcommand("build-banks", "sample templates and build orbit banks");
  add_common_flags(banks_cmd, banks_flags, /*config_required=*/true);
  auto* extract_cmd = app.add_subcommand("extract", "extract per-track features into the cache");
  add_common_flags(extract_cmd, extract_flags, /*config_required=*/true);
  auto* eval_cmd = app.add_subcommand("eval", "train and evaluate the classifier (--stage all "
                                              "runs the full ablation)");
  add_common_flags(eval_cmd, eval_flags, /*config_required=*/true);
  auto* inv_cmd = app.add_subcommand("invariance-test", "run the invariance property suites");
  add_common_flags(inv_cmd, inv_flags, /*config_required=*/true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth_flags);
    if (banks_cmd->parsed()) return cmd_build_banks(banks_flags);
    if (extract_cmd->parsed()) return cmd_extract(extract_flags);
    if (eval_cmd->parsed()) return cmd_eval(eval_flags);
    if (inv_cmd->parsed()) return cmd_invariance_test(inv_flags);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
