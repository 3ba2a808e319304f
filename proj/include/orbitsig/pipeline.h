// orbitsig/pipeline.h

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

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "orbitsig/pooling.h"
#include "orbitsig/signal-io.h"
#include "orbitsig/spectrogram.h"
#include "orbitsig/template-bank.h"

namespace orbitsig {

// The ablation stages: log-spectrogram only, + warp-invariant pooling,
// + temporal max pooling, + pitch-shift pooling.
enum class Stage { Base, Warp, WarpTranslation, WarpTranslationPitch };

std::string stage_name(Stage stage);
Stage stage_from_name(const std::string& name);

struct BaseLayerConfig {
  int sample_rate = 22050;
  bool allow_resample = false;  // off: clips at other rates are rejected
  SpectrogramConfig spec;
  FreqReduction reduction = FreqReduction::Linear;
  int reduced_bins = 512;
};

struct WarpLayerConfig {
  bool enabled = true;
  int templates = 256;
  int epsilon_count = 17;
  double epsilon_range = 0.4;
  PoolingSpec pooling = PoolingSpec::moments({1, 2, 3});
};

struct MaxPoolConfig {
  bool enabled = true;
  int width = 8;
  int stride = 3;
};

struct PitchLayerConfig {
  bool enabled = false;
  int templates = 256;
  int shift_min = -12;
  int shift_max = 12;
  int shift_step = 2;
  PoolingSpec pooling = PoolingSpec::moments({1, 2, 3});
};

struct Seeds {
  uint64_t split = 0;
  uint64_t templates = 0;
  uint64_t synth = 0;
};

struct PipelineConfig {
  BaseLayerConfig base;
  WarpLayerConfig warp;
  MaxPoolConfig maxpool;
  PitchLayerConfig pitch;
  Seeds seeds;
  double train_fraction = 0.8;

  // Enforces the monotone enable chain (pitch needs maxpool needs warp) and
  // per-layer parameter validity.
  void validate() const;

  Stage deepest_stage() const;

  // Copy with enable flags set for exactly this stage.
  PipelineConfig for_stage(Stage stage) const;

  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);

  // SHA-256 over the canonical JSON with the enable flags stripped, so all
  // ablation stages of one configuration share banks and caches.
  std::string config_hash() const;
};

struct FeatureSequence {
  Eigen::MatrixXd rows;
  std::string stage_tag;
};

// Base-layer representation of a single analysis window: magnitude spectrum,
// optional frequency reduction, log compression. Template construction and
// layer 1 share this path.
Eigen::VectorXd base_frame_representation(std::span<const double> window,
                                          const BaseLayerConfig& cfg, Fft& fft);

// Loads a manifest entry and applies the sample-rate policy.
AudioClip load_clip(const ManifestEntry& entry, const BaseLayerConfig& cfg);

// Warp bank: raw training windows, explicitly warped over the epsilon grid,
// each mapped through the base-layer representation.
TemplateBank build_warp_bank(const DatasetManifest& train, const PipelineConfig& cfg);

// Pitch bank: 8-frame base-layer segments from training tracks, coherently
// shifted along the frequency axis, propagated through layers 2-3; the
// resulting third-layer vectors are the orbit members.
TemplateBank build_pitch_bank(const DatasetManifest& train, const PipelineConfig& cfg,
                              const TemplateBank& warp_bank);

// Immutable layer stack; shareable across threads once constructed.
class FeaturePipeline {
 public:
  FeaturePipeline(PipelineConfig cfg, std::optional<TemplateBank> warp_bank,
                  std::optional<TemplateBank> pitch_bank);

  const PipelineConfig& config() const { return cfg_; }

  FeatureSequence layer1(const AudioClip& clip) const;
  FeatureSequence layer2_warp(const FeatureSequence& seq) const;
  static FeatureSequence layer3_maxpool(const FeatureSequence& seq, int width, int stride);
  FeatureSequence layer4_pitch(const FeatureSequence& seq) const;

  // Runs the layers enabled in the config, in order.
  FeatureSequence extract(const AudioClip& clip) const;

  static int maxpool_output_rows(int input_rows, int width, int stride);

 private:
  PipelineConfig cfg_;
  std::optional<TemplateBank> warp_bank_;
  std::optional<TemplateBank> pitch_bank_;
  std::unique_ptr<BankProjector> warp_projector_;
  std::unique_ptr<BankProjector> pitch_projector_;
};

// --- feature cache ----------------------------------------------------------

std::string feature_cache_path(const std::string& cache_dir, const std::string& track_id,
                               const std::string& stage_tag);

void write_cached_features(const std::string& cache_dir, const std::string& track_id,
                           const FeatureSequence& seq, const PipelineConfig& cfg);

// Returns the cached rows when present and hash-consistent; nullopt otherwise.
std::optional<Eigen::MatrixXd> read_cached_features(const std::string& cache_dir,
                                                    const std::string& track_id,
                                                    const std::string& stage_tag,
                                                    const std::string& config_hash);

}  // namespace orbitsig
