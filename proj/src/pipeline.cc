// orbitsig/pipeline.cc

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

#include "orbitsig/pipeline.h"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "orbitsig/util.h"

namespace orbitsig {

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::Base: return "base";
    case Stage::Warp: return "warp";
    case Stage::WarpTranslation: return "warp+translation";
    case Stage::WarpTranslationPitch: return "warp+translation+pitch";
  }
  throw std::logic_error("unreachable stage");
}

Stage stage_from_name(const std::string& name) {
  if (name == "base") return Stage::Base;
  if (name == "warp") return Stage::Warp;
  if (name == "warp+translation") return Stage::WarpTranslation;
  if (name == "warp+translation+pitch") return Stage::WarpTranslationPitch;
  throw ConfigError("unknown stage '" + name +
                    "' (expected base|warp|warp+translation|warp+translation+pitch)");
}

void PipelineConfig::validate() const {
  if (base.sample_rate <= 0) throw ConfigError("config: sample_rate must be positive");
  if (base.reduction != FreqReduction::None && base.reduced_bins < 1) {
    throw ConfigError("config: reduced_bins must be >= 1");
  }
  if (maxpool.width < 1 || maxpool.stride < 1) {
    throw ConfigError("config: maxpool width and stride must be >= 1");
  }
  if (pitch.enabled && !maxpool.enabled) {
    throw ConfigError("config: the pitch layer requires the maxpool layer");
  }
  if (maxpool.enabled && !warp.enabled) {
    throw ConfigError("config: the maxpool layer requires the warp layer");
  }
  if (warp.enabled) {
    if (warp.templates < 1) throw ConfigError("config: warp templates must be >= 1");
    warp_grid(warp.epsilon_count, warp.epsilon_range);  // validates grid settings
    warp.pooling.validate();
  }
  if (pitch.enabled) {
    if (pitch.templates < 1) throw ConfigError("config: pitch templates must be >= 1");
    shift_grid(pitch.shift_min, pitch.shift_max, pitch.shift_step);
    pitch.pooling.validate();
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("config: train_fraction must be in (0, 1)");
  }
}

Stage PipelineConfig::deepest_stage() const {
  if (pitch.enabled) return Stage::WarpTranslationPitch;
  if (maxpool.enabled) return Stage::WarpTranslation;
  if (warp.enabled) return Stage::Warp;
  return Stage::Base;
}

PipelineConfig PipelineConfig::for_stage(Stage stage) const {
  PipelineConfig out = *this;
  out.warp.enabled = stage >= Stage::Warp;
  out.maxpool.enabled = stage >= Stage::WarpTranslation;
  out.pitch.enabled = stage >= Stage::WarpTranslationPitch;
  return out;
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["base"] = {{"sample_rate", base.sample_rate},
               {"allow_resample", base.allow_resample},
               {"window_ms", base.spec.window_ms},
               {"hop_ms", base.spec.hop_ms},
               {"fft_size", base.spec.fft_size},
               {"log_floor", base.spec.log_floor},
               {"window", base.spec.window == WindowFn::Hann ? "hann" : "rectangular"},
               {"reduction", freq_reduction_name(base.reduction)},
               {"reduced_bins", base.reduced_bins}};
  j["warp_layer"] = {{"enabled", warp.enabled},
                     {"templates", warp.templates},
                     {"epsilon_count", warp.epsilon_count},
                     {"epsilon_range", warp.epsilon_range},
                     {"pooling", warp.pooling.to_json()}};
  j["maxpool_layer"] = {{"enabled", maxpool.enabled},
                        {"width", maxpool.width},
                        {"stride", maxpool.stride}};
  j["pitch_layer"] = {{"enabled", pitch.enabled},
                      {"templates", pitch.templates},
                      {"shift_min", pitch.shift_min},
                      {"shift_max", pitch.shift_max},
                      {"shift_step", pitch.shift_step},
                      {"pooling", pitch.pooling.to_json()}};
  j["seeds"] = {{"split", seeds.split}, {"templates", seeds.templates}, {"synth", seeds.synth}};
  j["train_fraction"] = train_fraction;
  return j;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  PipelineConfig cfg;
  try {
    if (j.value("version", 1) != 1) throw ConfigError("config: unsupported schema version");
    if (j.contains("base")) {
      const auto& b = j["base"];
      cfg.base.sample_rate = b.value("sample_rate", cfg.base.sample_rate);
      cfg.base.allow_resample = b.value("allow_resample", cfg.base.allow_resample);
      cfg.base.spec.window_ms = b.value("window_ms", cfg.base.spec.window_ms);
      cfg.base.spec.hop_ms = b.value("hop_ms", cfg.base.spec.hop_ms);
      cfg.base.spec.fft_size = b.value("fft_size", cfg.base.spec.fft_size);
      cfg.base.spec.log_floor = b.value("log_floor", cfg.base.spec.log_floor);
      const std::string win = b.value("window", "hann");
      if (win == "hann") cfg.base.spec.window = WindowFn::Hann;
      else if (win == "rectangular") cfg.base.spec.window = WindowFn::Rectangular;
      else throw ConfigError("config: unknown window '" + win + "'");
      cfg.base.reduction = freq_reduction_from_name(b.value("reduction", "linear"));
      cfg.base.reduced_bins = b.value("reduced_bins", cfg.base.reduced_bins);
    }
    if (j.contains("warp_layer")) {
      const auto& w = j["warp_layer"];
      cfg.warp.enabled = w.value("enabled", cfg.warp.enabled);
      cfg.warp.templates = w.value("templates", cfg.warp.templates);
      cfg.warp.epsilon_count = w.value("epsilon_count", cfg.warp.epsilon_count);
      cfg.warp.epsilon_range = w.value("epsilon_range", cfg.warp.epsilon_range);
      if (w.contains("pooling")) cfg.warp.pooling = PoolingSpec::from_json(w["pooling"]);
    }
    if (j.contains("maxpool_layer")) {
      const auto& m = j["maxpool_layer"];
      cfg.maxpool.enabled = m.value("enabled", cfg.maxpool.enabled);
      cfg.maxpool.width = m.value("width", cfg.maxpool.width);
      cfg.maxpool.stride = m.value("stride", cfg.maxpool.stride);
    }
    if (j.contains("pitch_layer")) {
      const auto& p = j["pitch_layer"];
      cfg.pitch.enabled = p.value("enabled", cfg.pitch.enabled);
      cfg.pitch.templates = p.value("templates", cfg.pitch.templates);
      cfg.pitch.shift_min = p.value("shift_min", cfg.pitch.shift_min);
      cfg.pitch.shift_max = p.value("shift_max", cfg.pitch.shift_max);
      cfg.pitch.shift_step = p.value("shift_step", cfg.pitch.shift_step);
      if (p.contains("pooling")) cfg.pitch.pooling = PoolingSpec::from_json(p["pooling"]);
    }
    if (j.contains("seeds")) {
      cfg.seeds.split = j["seeds"].value("split", cfg.seeds.split);
      cfg.seeds.templates = j["seeds"].value("templates", cfg.seeds.templates);
      cfg.seeds.synth = j["seeds"].value("synth", cfg.seeds.synth);
    }
    cfg.train_fraction = j.value("train_fraction", cfg.train_fraction);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: malformed JSON (") + e.what() + ")");
  }
  cfg.validate();
  return cfg;
}

std::string PipelineConfig::config_hash() const {
  nlohmann::json j = to_json();
  j["warp_layer"].erase("enabled");
  j["maxpool_layer"].erase("enabled");
  j["pitch_layer"].erase("enabled");
  return sha256_hex(j.dump());
}

Eigen::VectorXd base_frame_representation(std::span<const double> window,
                                          const BaseLayerConfig& cfg, Fft& fft) {
  std::vector<double> mags = magnitude_spectrum(fft, window, cfg.spec.window);
  if (cfg.reduction == FreqReduction::Linear) {
    mags = reduce_bins_linear(mags, cfg.reduced_bins);
  } else if (cfg.reduction == FreqReduction::Mel) {
    static thread_local std::unique_ptr<MelFilterbank> bank;
    static thread_local int bank_fft = 0, bank_sr = 0, bank_n = 0;
    if (!bank || bank_fft != fft.size() || bank_sr != cfg.sample_rate ||
        bank_n != cfg.reduced_bins) {
      bank = std::make_unique<MelFilterbank>(cfg.reduced_bins, fft.size(), cfg.sample_rate);
      bank_fft = fft.size();
      bank_sr = cfg.sample_rate;
      bank_n = cfg.reduced_bins;
    }
    mags = bank->apply(mags);
  }
  const auto row = log_compress(mags, cfg.spec.log_floor);
  return Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
}

AudioClip load_clip(const ManifestEntry& entry, const BaseLayerConfig& cfg) {
  AudioClip clip = load_audio(entry.path);
  if (clip.sample_rate != cfg.sample_rate) {
    if (!cfg.allow_resample) {
      throw ConfigError("track '" + entry.track_id + "' has sample rate " +
                        std::to_string(clip.sample_rate) + ", expected " +
                        std::to_string(cfg.sample_rate) +
                        " (set allow_resample to convert)");
    }
    clip.samples = resample_linear(clip.samples, clip.sample_rate, cfg.sample_rate);
    clip.sample_rate = cfg.sample_rate;
  }
  return clip;
}

namespace {

int base_dim(const PipelineConfig& cfg) {
  if (cfg.base.reduction == FreqReduction::None) {
    const int win = duration_to_samples(cfg.base.spec.window_ms, cfg.base.sample_rate);
    return cfg.base.spec.resolve_fft_size(win) / 2 + 1;
  }
  return cfg.base.reduced_bins;
}

}  // namespace

TemplateBank build_warp_bank(const DatasetManifest& train, const PipelineConfig& cfg) {
  cfg.validate();
  if (!cfg.warp.enabled) throw ConfigError("build_warp_bank: warp layer disabled");

  // Raw audio windows; the warp acts on the signal, the representation maps
  // each warped copy into base-layer space.
  FeatureProvider provider = [&cfg](const ManifestEntry& entry) {
    const AudioClip clip = load_clip(entry, cfg.base);
    const auto windows = frame_signal(clip, cfg.base.spec.window_ms, cfg.base.spec.hop_ms);
    std::vector<Eigen::VectorXd> vecs;
    vecs.reserve(windows.size());
    for (const auto& w : windows) {
      vecs.push_back(Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())));
    }
    return vecs;
  };

  const uint64_t seed = splitmix64(cfg.seeds.templates ^ 0x77617270ULL);  // warp stream
  const auto samples = sample_templates(train, cfg.warp.templates, provider, seed);
  const TransformSpec spec = warp_grid(cfg.warp.epsilon_count, cfg.warp.epsilon_range);

  const int win = duration_to_samples(cfg.base.spec.window_ms, cfg.base.sample_rate);
  Fft fft(cfg.base.spec.resolve_fft_size(win));
  RepresentationFn rep = [&cfg, &fft](const std::vector<double>& warped) {
    return base_frame_representation(warped, cfg.base, fft);
  };

  TemplateBank bank;
  bank.layer_tag = "warp";
  bank.config_hash = cfg.config_hash();
  for (size_t k = 0; k < samples.size(); ++k) {
    TemplateOrbit orbit = build_orbit(samples[k].vec, spec, rep);
    orbit.template_id = static_cast<int64_t>(k);
    orbit.source_track = samples[k].source_track;
    bank.orbits.push_back(std::move(orbit));
  }
  bank.validate();
  return bank;
}

TemplateBank build_pitch_bank(const DatasetManifest& train, const PipelineConfig& cfg,
                              const TemplateBank& warp_bank) {
  cfg.validate();
  if (!cfg.pitch.enabled) throw ConfigError("build_pitch_bank: pitch layer disabled");
  const int d = base_dim(cfg);
  const int seg = cfg.maxpool.width;

  // Candidate templates are flattened (width x d) blocks of consecutive
  // base-layer frames, one per maxpool window position.
  const int win = duration_to_samples(cfg.base.spec.window_ms, cfg.base.sample_rate);
  const int n_fft = cfg.base.spec.resolve_fft_size(win);
  FeatureProvider provider = [&cfg, d, seg, n_fft](const ManifestEntry& entry) {
    const AudioClip clip = load_clip(entry, cfg.base);
    const auto windows = frame_signal(clip, cfg.base.spec.window_ms, cfg.base.spec.hop_ms);
    Fft fft(n_fft);
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(windows.size()), d);
    for (size_t i = 0; i < windows.size(); ++i) {
      rows.row(static_cast<Eigen::Index>(i)) = base_frame_representation(windows[i], cfg.base, fft);
    }
    std::vector<Eigen::VectorXd> segments;
    const int t = static_cast<int>(rows.rows());
    for (int start = 0; start + seg <= t; start += cfg.maxpool.stride) {
      Eigen::VectorXd flat(static_cast<Eigen::Index>(seg) * d);
      for (int f = 0; f < seg; ++f) flat.segment(static_cast<Eigen::Index>(f) * d, d) = rows.row(start + f);
      segments.push_back(std::move(flat));
    }
    return segments;
  };

  const uint64_t seed = splitmix64(cfg.seeds.templates ^ 0x7069746368ULL);  // pitch stream
  const auto samples = sample_templates(train, cfg.pitch.templates, provider, seed);
  const TransformSpec spec = shift_grid(cfg.pitch.shift_min, cfg.pitch.shift_max, cfg.pitch.shift_step);

  const double fill = std::log(cfg.base.spec.log_floor);
  BankProjector warp_projector(warp_bank, cfg.warp.pooling);

  TemplateBank bank;
  bank.layer_tag = "pitch";
  bank.config_hash = cfg.config_hash();
  for (size_t k = 0; k < samples.size(); ++k) {
    std::vector<Eigen::VectorXd> members;
    members.reserve(spec.parameters.size());
    for (double p : spec.parameters) {
      const int s = static_cast<int>(std::llround(p));
      // Shift every frame of the segment coherently, then run layers 2-3.
      Eigen::MatrixXd shifted(seg, d);
      for (int f = 0; f < seg; ++f) {
        const Eigen::VectorXd frame = samples[k].vec.segment(static_cast<Eigen::Index>(f) * d, d);
        const std::vector<double> frame_v(frame.data(), frame.data() + frame.size());
        const auto sh = pitch_shift_frame(frame_v, s, fill);
        shifted.row(f) = Eigen::Map<const Eigen::VectorXd>(sh.data(), d);
      }
      const Eigen::MatrixXd sigs = warp_projector.signatures(shifted);
      members.push_back(sigs.colwise().maxCoeff().transpose());
    }
    TemplateOrbit orbit = finalize_orbit(std::move(members), spec);
    orbit.template_id = static_cast<int64_t>(k);
    orbit.source_track = samples[k].source_track;
    bank.orbits.push_back(std::move(orbit));
  }
  bank.validate();
  return bank;
}

FeaturePipeline::FeaturePipeline(PipelineConfig cfg, std::optional<TemplateBank> warp_bank,
                                 std::optional<TemplateBank> pitch_bank)
    : cfg_(std::move(cfg)), warp_bank_(std::move(warp_bank)), pitch_bank_(std::move(pitch_bank)) {
  cfg_.validate();
  const std::string expected = cfg_.config_hash();
  if (cfg_.warp.enabled) {
    if (!warp_bank_) throw ConfigError("pipeline: warp layer enabled but no warp bank supplied");
    if (warp_bank_->config_hash != expected) {
      throw ConfigError("pipeline: warp bank config hash mismatch (expected " + expected +
                        ", found " + warp_bank_->config_hash + ")");
    }
    warp_projector_ = std::make_unique<BankProjector>(*warp_bank_, cfg_.warp.pooling);
  }
  if (cfg_.pitch.enabled) {
    if (!pitch_bank_) throw ConfigError("pipeline: pitch layer enabled but no pitch bank supplied");
    if (pitch_bank_->config_hash != expected) {
      throw ConfigError("pipeline: pitch bank config hash mismatch (expected " + expected +
                        ", found " + pitch_bank_->config_hash + ")");
    }
    pitch_projector_ = std::make_unique<BankProjector>(*pitch_bank_, cfg_.pitch.pooling);
  }
}

FeatureSequence FeaturePipeline::layer1(const AudioClip& clip) const {
  const auto windows = frame_signal(clip, cfg_.base.spec.window_ms, cfg_.base.spec.hop_ms);
  const int d = base_dim(cfg_);
  Fft fft(cfg_.base.spec.resolve_fft_size(static_cast<int>(windows.front().size())));
  FeatureSequence seq;
  seq.stage_tag = stage_name(Stage::Base);
  seq.rows.resize(static_cast<Eigen::Index>(windows.size()), d);
  for (size_t i = 0; i < windows.size(); ++i) {
    seq.rows.row(static_cast<Eigen::Index>(i)) = base_frame_representation(windows[i], cfg_.base, fft);
  }
  return seq;
}

FeatureSequence FeaturePipeline::layer2_warp(const FeatureSequence& seq) const {
  if (!warp_projector_) throw ConfigError("layer2_warp: no warp bank");
  FeatureSequence out;
  out.stage_tag = stage_name(Stage::Warp);
  out.rows = warp_projector_->signatures(seq.rows);
  return out;
}

int FeaturePipeline::maxpool_output_rows(int input_rows, int width, int stride) {
  if (input_rows < width) {
    throw std::invalid_argument("maxpool: " + std::to_string(input_rows) +
                                " rows is fewer than the pooling width " + std::to_string(width));
  }
  return (input_rows - width) / stride + 1;
}

FeatureSequence FeaturePipeline::layer3_maxpool(const FeatureSequence& seq, int width, int stride) {
  if (width < 1 || stride < 1) throw std::invalid_argument("maxpool: width and stride must be >= 1");
  const int t = static_cast<int>(seq.rows.rows());
  const int out_rows = maxpool_output_rows(t, width, stride);
  FeatureSequence out;
  out.stage_tag = stage_name(Stage::WarpTranslation);
  out.rows.resize(out_rows, seq.rows.cols());
  for (int j = 0; j < out_rows; ++j) {
    Eigen::RowVectorXd acc = seq.rows.row(static_cast<Eigen::Index>(j) * stride);
    for (int f = 1; f < width; ++f) {
      acc = acc.cwiseMax(seq.rows.row(static_cast<Eigen::Index>(j) * stride + f));
    }
    out.rows.row(j) = acc;
  }
  return out;
}

FeatureSequence FeaturePipeline::layer4_pitch(const FeatureSequence& seq) const {
  if (!pitch_projector_) throw ConfigError("layer4_pitch: no pitch bank");
  FeatureSequence out;
  out.stage_tag = stage_name(Stage::WarpTranslationPitch);
  out.rows = pitch_projector_->signatures(seq.rows);
  return out;
}

FeatureSequence FeaturePipeline::extract(const AudioClip& clip) const {
  FeatureSequence seq = layer1(clip);
  if (!cfg_.warp.enabled) return seq;
  seq = layer2_warp(seq);
  if (!cfg_.maxpool.enabled) return seq;
  seq = layer3_maxpool(seq, cfg_.maxpool.width, cfg_.maxpool.stride);
  if (!cfg_.pitch.enabled) return seq;
  return layer4_pitch(seq);
}

std::string feature_cache_path(const std::string& cache_dir, const std::string& track_id,
                               const std::string& stage_tag) {
  return (std::filesystem::path(cache_dir) / (track_id + "." + stage_tag + ".tfm")).string();
}

void write_cached_features(const std::string& cache_dir, const std::string& track_id,
                           const FeatureSequence& seq, const PipelineConfig& cfg) {
  std::filesystem::create_directories(cache_dir);
  write_tfm(feature_cache_path(cache_dir, track_id, seq.stage_tag), seq.rows,
            cfg.to_json(), cfg.config_hash());
}

std::optional<Eigen::MatrixXd> read_cached_features(const std::string& cache_dir,
                                                    const std::string& track_id,
                                                    const std::string& stage_tag,
                                                    const std::string& config_hash) {
  const std::string path = feature_cache_path(cache_dir, track_id, stage_tag);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    TfmFile tfm = read_tfm(path, /*require_sidecar=*/true);
    if (tfm.config_hash != config_hash) return std::nullopt;
    return tfm.values;
  } catch (const IoError&) {
    return std::nullopt;  // unreadable cache entries are recomputed
  }
}

}  // namespace orbitsig
