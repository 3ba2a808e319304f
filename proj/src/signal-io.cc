// orbitsig/signal-io.cc

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

#include "orbitsig/signal-io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "orbitsig/util.h"

namespace orbitsig {

namespace {

uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t get_u16_le(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32_le(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16_le(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;

}  // namespace

AudioClip load_audio(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw IoError("audio file not found: " + path);
  }
  const std::string bytes = read_file_bytes(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const size_t n = bytes.size();

  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw IoError("malformed WAV header (missing RIFF/WAVE): " + path);
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  bool have_fmt = false;
  size_t data_off = 0, data_len = 0;

  size_t off = 12;
  while (off + 8 <= n) {
    const char* chunk_id = reinterpret_cast<const char*>(p + off);
    uint32_t chunk_len = get_u32_le(p + off + 4);
    size_t body = off + 8;
    if (body + chunk_len > n) {
      // Tolerate a short final data chunk only.
      if (std::memcmp(chunk_id, "data", 4) == 0) chunk_len = static_cast<uint32_t>(n - body);
      else throw IoError("malformed WAV (truncated chunk '" + std::string(chunk_id, 4) + "'): " + path);
    }
    if (std::memcmp(chunk_id, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw IoError("malformed WAV (short fmt chunk): " + path);
      format = get_u16_le(p + body);
      channels = get_u16_le(p + body + 2);
      sample_rate = get_u32_le(p + body + 4);
      bits = get_u16_le(p + body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk_id, "data", 4) == 0) {
      data_off = body;
      data_len = chunk_len;
    }
    off = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_off == 0) {
    throw IoError("malformed WAV (missing fmt or data chunk): " + path);
  }
  if (channels != 1 && channels != 2) {
    throw IoError("unsupported WAV channel count " + std::to_string(channels) + ": " + path);
  }
  if (sample_rate == 0) throw IoError("malformed WAV (zero sample rate): " + path);

  const bool is_float = format == kFormatFloat && bits == 32;
  const bool is_int = format == kFormatPcm && (bits == 8 || bits == 16 || bits == 24);
  if (!is_float && !is_int) {
    throw IoError("unsupported WAV encoding (format " + std::to_string(format) + ", " +
                  std::to_string(bits) + "-bit): " + path);
  }

  const size_t bytes_per_sample = bits / 8;
  const size_t frame_bytes = bytes_per_sample * channels;
  const size_t frames = data_len / frame_bytes;
  if (frames == 0) throw IoError("WAV contains no samples: " + path);

  AudioClip clip;
  clip.sample_rate = static_cast<int>(sample_rate);
  clip.samples.resize(frames);

  const unsigned char* d = p + data_off;
  for (size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      const unsigned char* s = d + i * frame_bytes + c * bytes_per_sample;
      double v;
      if (is_float) {
        float f;
        uint32_t u = get_u32_le(s);
        std::memcpy(&f, &u, 4);
        v = f;
      } else if (bits == 8) {
        v = (static_cast<int>(*s) - 128) / 128.0;
      } else if (bits == 16) {
        v = static_cast<int16_t>(get_u16_le(s)) / 32768.0;
      } else {  // 24-bit
        int32_t x = static_cast<int32_t>(s[0]) | (static_cast<int32_t>(s[1]) << 8) |
                    (static_cast<int32_t>(s[2]) << 16);
        if (x & 0x800000) x |= ~0xffffff;  // sign-extend
        v = x / 8388608.0;
      }
      acc += v;
    }
    double m = acc / channels;
    if (!std::isfinite(m)) throw IoError("non-finite sample in WAV: " + path);
    clip.samples[i] = std::clamp(m, -1.0, 1.0);
  }
  return clip;
}

void save_wav16(const std::string& path, const AudioClip& clip) {
  if (clip.samples.empty() || clip.sample_rate <= 0) {
    throw std::invalid_argument("save_wav16: empty clip or bad sample rate");
  }
  const uint32_t data_len = static_cast<uint32_t>(clip.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_len);
  out.append("RIFF");
  put_u32_le(out, 36 + data_len);
  out.append("WAVE");
  out.append("fmt ");
  put_u32_le(out, 16);
  put_u16_le(out, kFormatPcm);
  put_u16_le(out, 1);  // mono
  put_u32_le(out, static_cast<uint32_t>(clip.sample_rate));
  put_u32_le(out, static_cast<uint32_t>(clip.sample_rate) * 2);
  put_u16_le(out, 2);   // block align
  put_u16_le(out, 16);  // bits
  out.append("data");
  put_u32_le(out, data_len);
  for (double s : clip.samples) {
    double v = std::clamp(s, -1.0, 1.0) * 32767.0;
    auto q = static_cast<int16_t>(std::lround(v));
    put_u16_le(out, static_cast<uint16_t>(q));
  }
  write_file_bytes(path, out);
}

int duration_to_samples(double ms, int sample_rate) {
  if (ms <= 0.0 || sample_rate <= 0) {
    throw std::invalid_argument("duration_to_samples: ms and sample_rate must be positive");
  }
  // (ms * rate) / 1000 keeps common configs exact in double; llrint ties to
  // even under the default rounding mode (370 ms @ 22050 Hz -> 8158).
  return static_cast<int>(std::llrint(ms * sample_rate / 1000.0));
}

FramePlan plan_frames(size_t n_samples, int sample_rate, double window_ms, double hop_ms) {
  FramePlan plan;
  plan.window_samples = duration_to_samples(window_ms, sample_rate);
  plan.hop_samples = duration_to_samples(hop_ms, sample_rate);
  if (plan.window_samples <= 0 || plan.hop_samples <= 0) {
    throw std::invalid_argument("plan_frames: window and hop must be positive");
  }
  if (n_samples < static_cast<size_t>(plan.window_samples)) {
    throw std::invalid_argument("plan_frames: clip shorter than one window (" +
                                std::to_string(n_samples) + " < " +
                                std::to_string(plan.window_samples) + " samples)");
  }
  plan.count = static_cast<int>((n_samples - plan.window_samples) / plan.hop_samples) + 1;
  return plan;
}

std::vector<std::vector<double>> frame_signal(const AudioClip& clip,
                                              double window_ms, double hop_ms) {
  FramePlan plan = plan_frames(clip.samples.size(), clip.sample_rate, window_ms, hop_ms);
  std::vector<std::vector<double>> windows;
  windows.reserve(plan.count);
  for (int i = 0; i < plan.count; ++i) {
    const size_t start = static_cast<size_t>(i) * plan.hop_samples;
    windows.emplace_back(clip.samples.begin() + start,
                         clip.samples.begin() + start + plan.window_samples);
  }
  return windows;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

DatasetManifest read_manifest(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open manifest: " + csv_path);
  const std::filesystem::path base = std::filesystem::path(csv_path).parent_path();

  std::string line;
  if (!std::getline(in, line)) throw IoError("empty manifest: " + csv_path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "track_id,path,label") {
    throw IoError("manifest must start with header 'track_id,path,label': " + csv_path);
  }

  struct RawRow {
    std::string id, path, label;
  };
  std::vector<RawRow> rows;
  std::set<std::string> labels;
  std::set<std::string> seen_ids;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw IoError("malformed manifest row at line " + std::to_string(line_no) + ": " + csv_path);
    }
    if (!seen_ids.insert(fields[0]).second) {
      throw IoError("duplicate track_id '" + fields[0] + "' in manifest: " + csv_path);
    }
    labels.insert(fields[2]);
    rows.push_back({fields[0], fields[1], fields[2]});
  }
  if (rows.empty()) throw IoError("manifest has no rows: " + csv_path);

  DatasetManifest manifest;
  manifest.class_names.assign(labels.begin(), labels.end());  // sorted unique
  std::map<std::string, int> label_index;
  for (size_t i = 0; i < manifest.class_names.size(); ++i) {
    label_index[manifest.class_names[i]] = static_cast<int>(i);
  }
  for (const auto& r : rows) {
    std::filesystem::path fp(r.path);
    if (fp.is_relative()) fp = base / fp;
    manifest.entries.push_back({r.id, fp.string(), label_index[r.label]});
  }
  return manifest;
}

void write_manifest(const std::string& csv_path, const DatasetManifest& manifest) {
  std::string out = "track_id,path,label\n";
  for (const auto& e : manifest.entries) {
    out += e.track_id + "," + e.path + "," + manifest.class_names.at(e.label) + "\n";
  }
  write_file_bytes(csv_path, out);
}

std::pair<DatasetManifest, DatasetManifest> split_dataset(
    const DatasetManifest& manifest, double train_fraction, uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("split_dataset: train_fraction must be in (0, 1)");
  }

  std::vector<std::vector<size_t>> by_class(manifest.class_names.size());
  for (size_t i = 0; i < manifest.entries.size(); ++i) {
    by_class.at(manifest.entries[i].label).push_back(i);
  }

  std::vector<char> in_train(manifest.entries.size(), 0);
  Rng rng(splitmix64(seed ^ 0x5b7a9d4c3f2e1d0cULL));
  for (size_t c = 0; c < by_class.size(); ++c) {
    auto& idx = by_class[c];
    if (idx.size() < 2) {
      throw std::invalid_argument("split_dataset: class '" + manifest.class_names[c] +
                                  "' has fewer than 2 tracks");
    }
    rng.shuffle(idx);
    auto n_train = static_cast<size_t>(std::llround(train_fraction * idx.size()));
    n_train = std::clamp<size_t>(n_train, 1, idx.size() - 1);
    for (size_t i = 0; i < n_train; ++i) in_train[idx[i]] = 1;
  }

  DatasetManifest train, test;
  train.class_names = test.class_names = manifest.class_names;
  train.split_seed = test.split_seed = seed;
  for (size_t i = 0; i < manifest.entries.size(); ++i) {
    (in_train[i] ? train : test).entries.push_back(manifest.entries[i]);
  }
  return {train, test};
}

}  // namespace orbitsig
