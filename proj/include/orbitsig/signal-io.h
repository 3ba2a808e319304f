// orbitsig/signal-io.h

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

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace orbitsig {

// Mono waveform, samples in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// Decodes a RIFF/WAV PCM file: 8/16/24-bit integer or 32-bit float, mono or
// stereo (stereo is averaged down to mono). Integer samples are scaled by the
// full-scale magnitude of their type, e.g. int16 v -> v / 32768.
AudioClip load_audio(const std::string& path);

// 16-bit PCM mono writer, used by the synthetic-corpus generator and tests.
// Samples are clamped to [-1, 1] and quantized with round-half-away rounding.
void save_wav16(const std::string& path, const AudioClip& clip);

// round(ms * sample_rate / 1000), ties to even. 370 ms at 22050 Hz -> 8158.
int duration_to_samples(double ms, int sample_rate);

struct FramePlan {
  int window_samples = 0;
  int hop_samples = 0;
  int count = 0;  // floor((n - window) / hop) + 1
};

FramePlan plan_frames(size_t n_samples, int sample_rate, double window_ms, double hop_ms);

// Slices the clip into fixed-length windows starting at multiples of the hop.
// A trailing partial window is discarded. Throws std::invalid_argument when
// the clip is shorter than one window.
std::vector<std::vector<double>> frame_signal(const AudioClip& clip,
                                              double window_ms, double hop_ms);

struct ManifestEntry {
  std::string track_id;
  std::string path;
  int label = 0;  // index into DatasetManifest::class_names
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> class_names;
  uint64_t split_seed = 0;

  const std::string& label_name(int label) const { return class_names.at(label); }
};

// CSV with header `track_id,path,label`. Label strings are mapped to indices
// into the sorted unique label set. Relative paths are resolved against the
// CSV's directory. Duplicate track ids are an error.
DatasetManifest read_manifest(const std::string& csv_path);

void write_manifest(const std::string& csv_path, const DatasetManifest& manifest);

// Per-class stratified split; deterministic in (manifest, seed). Each class
// contributes clamp(round(train_fraction * n), 1, n - 1) train tracks, so a
// class with fewer than 2 tracks is an error.
std::pair<DatasetManifest, DatasetManifest> split_dataset(
    const DatasetManifest& manifest, double train_fraction, uint64_t seed);

}  // namespace orbitsig
