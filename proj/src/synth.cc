// orbitsig/synth.cc

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

#include "orbitsig/synth.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "orbitsig/util.h"

namespace orbitsig {

namespace {

constexpr int kHarmonics = 16;

struct ClassTheme {
  double f0;
  double harmonic_amp[kHarmonics];  // index h-1
  double beat_rate;
  double beat_shape;
  double beat_depth;
};

// Class identity lives in the harmonic amplitude profile (a function of
// harmonic index, which warping preserves) and the beat pattern. The
// fundamentals are spaced by ~10%, well inside the per-track warp range, so
// absolute peak positions alias across classes.
ClassTheme class_theme(int c) {
  ClassTheme theme{};
  theme.f0 = 150.0 * std::pow(1.1, c % 5) * (1.0 + 0.003 * (c / 5));
  const int variant = c % 5;
  for (int h = 1; h <= kHarmonics; ++h) {
    double a = 0.0;
    const double hs = std::sqrt(static_cast<double>(h));
    switch (variant) {
      case 0: a = 1.0 / hs; break;
      case 1: a = (h % 2 == 1) ? 1.0 / hs : 0.04 / hs; break;
      case 2: a = std::exp(-0.12 * (h - 5.0) * (h - 5.0)) + 0.08; break;
      case 3: a = (h % 3 == 0 ? 1.8 : 0.45) / hs; break;
      case 4:
        a = std::exp(-0.5 * (h - 2.0) * (h - 2.0)) +
            0.9 * std::exp(-0.2 * (h - 12.0) * (h - 12.0));
        break;
    }
    theme.harmonic_amp[h - 1] = a;
  }
  static const double rates[5] = {2.0, 3.1, 4.3, 5.3, 6.7};
  static const double shapes[5] = {1.0, 2.0, 4.0, 8.0, 1.5};
  static const double depths[5] = {0.9, 0.7, 0.9, 0.6, 0.8};
  theme.beat_rate = rates[variant];
  theme.beat_shape = shapes[variant];
  theme.beat_depth = depths[variant];
  return theme;
}

double beat_envelope(const ClassTheme& theme, double u) {
  const double s = 0.5 * (1.0 + std::sin(2.0 * M_PI * theme.beat_rate * u - M_PI / 2.0));
  return (1.0 - theme.beat_depth) + theme.beat_depth * std::pow(s, theme.beat_shape);
}

bool noise_enabled(double snr_db) { return std::isfinite(snr_db) && snr_db < 300.0; }

}  // namespace

AudioClip render_synth_track(const SynthConfig& cfg, int class_index, int track_index) {
  if (cfg.classes < 1 || cfg.tracks_per_class < 1 || cfg.duration_s <= 0.0 ||
      cfg.sample_rate <= 0) {
    throw std::invalid_argument("render_synth_track: bad corpus settings");
  }
  const ClassTheme theme = class_theme(class_index);
  Rng rng(splitmix64(cfg.seed ^ (0x53594e54ULL + static_cast<uint64_t>(class_index) * 100003ULL +
                                 static_cast<uint64_t>(track_index))));

  const double eps = rng.uniform(-cfg.warp_jitter, cfg.warp_jitter);
  const double semitones = rng.uniform(-cfg.pitch_jitter_semitones, cfg.pitch_jitter_semitones);
  const double phase_draw = rng.uniform01();
  const double rate = 1.0 + eps;
  const double pitch_factor = std::pow(2.0, semitones / 12.0);
  const double env_phase = cfg.warp_jitter > 0.0 ? phase_draw / theme.beat_rate : 0.0;

  // Per-class harmonic phases, independent of the corpus seed.
  double harmonic_phase[kHarmonics];
  for (int h = 0; h < kHarmonics; ++h) {
    harmonic_phase[h] =
        2.0 * M_PI *
        (splitmix64(0xfa5eULL + class_index * 131ULL + h) % 100000ULL) / 100000.0;
  }

  const auto n = static_cast<size_t>(std::llround(cfg.duration_s * cfg.sample_rate));
  AudioClip clip;
  clip.sample_rate = cfg.sample_rate;
  clip.samples.resize(n, 0.0);

  const double nyquist = cfg.sample_rate / 2.0;
  double peak = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / cfg.sample_rate;
    double v = 0.0;
    for (int h = 1; h <= kHarmonics; ++h) {
      const double f = h * theme.f0 * rate * pitch_factor;
      if (f >= 0.95 * nyquist) break;
      v += theme.harmonic_amp[h - 1] * std::sin(2.0 * M_PI * f * t + harmonic_phase[h - 1]);
    }
    v *= beat_envelope(theme, rate * t + env_phase);
    clip.samples[i] = v;
    peak = std::max(peak, std::abs(v));
  }

  if (peak > 0.0) {
    const double gain = 0.85 / peak;
    for (double& s : clip.samples) s *= gain;
  }

  if (noise_enabled(cfg.snr_db)) {
    double sumsq = 0.0;
    for (double s : clip.samples) sumsq += s * s;
    const double rms = std::sqrt(sumsq / static_cast<double>(n));
    const double sigma = rms * std::pow(10.0, -cfg.snr_db / 20.0);
    for (double& s : clip.samples) s += sigma * rng.normal();
  }
  return clip;
}

DatasetManifest generate_synth_corpus(const std::string& out_dir, const SynthConfig& cfg) {
  std::filesystem::create_directories(out_dir);
  DatasetManifest manifest;
  for (int c = 0; c < cfg.classes; ++c) {
    manifest.class_names.push_back("class" + std::to_string(c));
  }
  for (int c = 0; c < cfg.classes; ++c) {
    for (int t = 0; t < cfg.tracks_per_class; ++t) {
      char id[64];
      std::snprintf(id, sizeof(id), "c%d_t%03d", c, t);
      const std::string filename = std::string(id) + ".wav";
      const AudioClip clip = render_synth_track(cfg, c, t);
      save_wav16((std::filesystem::path(out_dir) / filename).string(), clip);
      manifest.entries.push_back(
          {id, (std::filesystem::path(out_dir) / filename).string(), c});
    }
  }

  // The manifest on disk uses paths relative to its own directory.
  DatasetManifest rel = manifest;
  for (auto& e : rel.entries) {
    e.path = std::filesystem::path(e.path).filename().string();
  }
  write_manifest((std::filesystem::path(out_dir) / "manifest.csv").string(), rel);
  return manifest;
}

}  // namespace orbitsig
