// orbitsig/spectrogram.cc

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

#include "orbitsig/spectrogram.h"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <mutex>
#include <stdexcept>

#include "orbitsig/util.h"

namespace orbitsig {

namespace {
// FFTW's planner is not thread-safe; plan creation/destruction is serialized.
std::mutex g_fftw_planner_mutex;
}  // namespace

Fft::Fft(int n) : n_(n) {
  if (n < 2 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("Fft: size must be a power of two >= 2, got " + std::to_string(n));
  }
  in_buf_ = fftw_alloc_real(n);
  out_buf_ = fftw_alloc_complex(n / 2 + 1);
  std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
  plan_ = fftw_plan_dft_r2c_1d(n, in_buf_, static_cast<fftw_complex*>(out_buf_), FFTW_ESTIMATE);
  if (!plan_) throw std::runtime_error("fftw plan creation failed");
}

Fft::~Fft() {
  if (plan_) {
    std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
  if (in_buf_) fftw_free(in_buf_);
  if (out_buf_) fftw_free(out_buf_);
}

Fft::Fft(Fft&& other) noexcept
    : n_(other.n_), plan_(other.plan_), in_buf_(other.in_buf_), out_buf_(other.out_buf_) {
  other.plan_ = nullptr;
  other.in_buf_ = nullptr;
  other.out_buf_ = nullptr;
}

void Fft::forward(std::span<const double> in, std::complex<double>* out) {
  if (in.size() > static_cast<size_t>(n_)) {
    throw std::invalid_argument("Fft::forward: input longer than transform size");
  }
  std::memcpy(in_buf_, in.data(), in.size() * sizeof(double));
  std::memset(in_buf_ + in.size(), 0, (n_ - in.size()) * sizeof(double));
  fftw_execute(static_cast<fftw_plan>(plan_));
  std::memcpy(out, out_buf_, (n_ / 2 + 1) * sizeof(std::complex<double>));
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

namespace {

void apply_window(std::span<const double> in, WindowFn win, std::vector<double>& out) {
  const size_t n = in.size();
  out.assign(in.begin(), in.end());
  if (win == WindowFn::Hann && n > 1) {
    const double c = 2.0 * M_PI / static_cast<double>(n - 1);
    for (size_t i = 0; i < n; ++i) {
      out[i] *= 0.5 * (1.0 - std::cos(c * static_cast<double>(i)));
    }
  }
}

std::vector<double> magnitudes_from(Fft& fft, std::span<const double> window, WindowFn win) {
  if (window.empty()) throw std::invalid_argument("magnitude_spectrum: empty window");
  if (fft.size() < static_cast<int>(window.size())) {
    throw std::invalid_argument("magnitude_spectrum: fft_size " + std::to_string(fft.size()) +
                                " smaller than window length " + std::to_string(window.size()));
  }
  static thread_local std::vector<double> windowed;
  apply_window(window, win, windowed);
  std::vector<std::complex<double>> spec(fft.size() / 2 + 1);
  fft.forward(windowed, spec.data());
  std::vector<double> mags(spec.size());
  for (size_t i = 0; i < spec.size(); ++i) mags[i] = std::abs(spec[i]);
  return mags;
}

}  // namespace

std::vector<double> magnitude_spectrum(std::span<const double> window, int fft_size, WindowFn win) {
  Fft fft(fft_size);
  return magnitudes_from(fft, window, win);
}

std::vector<double> magnitude_spectrum(Fft& fft, std::span<const double> window, WindowFn win) {
  return magnitudes_from(fft, window, win);
}

std::vector<double> log_compress(std::span<const double> magnitudes, double floor_value) {
  if (floor_value <= 0.0) throw std::invalid_argument("log_compress: floor must be positive");
  std::vector<double> out(magnitudes.size());
  for (size_t i = 0; i < magnitudes.size(); ++i) {
    const double m = magnitudes[i];
    if (!std::isfinite(m) || m < 0.0) {
      throw std::invalid_argument("log_compress: magnitudes must be finite and >= 0");
    }
    out[i] = std::log(m + floor_value);
  }
  return out;
}

int SpectrogramConfig::resolve_fft_size(int window_samples) const {
  if (fft_size != 0) {
    if (fft_size < window_samples) {
      throw std::invalid_argument("fft_size " + std::to_string(fft_size) +
                                  " smaller than window (" + std::to_string(window_samples) +
                                  " samples)");
    }
    if ((fft_size & (fft_size - 1)) != 0) {
      throw std::invalid_argument("fft_size must be a power of two");
    }
    return fft_size;
  }
  // Auto: zero-pad to at least twice the window (16384 for the 8158-sample
  // default), which doubles the bin resolution of the padded transform.
  return next_pow2(2 * window_samples);
}

TimeFreqMatrix log_spectrogram(const AudioClip& clip, const SpectrogramConfig& cfg) {
  const auto windows = frame_signal(clip, cfg.window_ms, cfg.hop_ms);
  const int n_fft = cfg.resolve_fft_size(static_cast<int>(windows.front().size()));
  const int bins = n_fft / 2 + 1;
  const int hop = duration_to_samples(cfg.hop_ms, clip.sample_rate);

  TimeFreqMatrix tfm;
  tfm.values.resize(static_cast<Eigen::Index>(windows.size()), bins);
  Fft fft(n_fft);
  for (size_t i = 0; i < windows.size(); ++i) {
    const auto mags = magnitude_spectrum(fft, windows[i], cfg.window);
    const auto row = log_compress(mags, cfg.log_floor);
    for (int b = 0; b < bins; ++b) tfm.values(static_cast<Eigen::Index>(i), b) = row[b];
    tfm.frame_times.push_back(static_cast<double>(i) * hop / clip.sample_rate);
  }
  for (int b = 0; b < bins; ++b) {
    tfm.bin_freqs.push_back(static_cast<double>(b) * clip.sample_rate / n_fft);
  }
  return tfm;
}

double MelFilterbank::hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelFilterbank::mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(int num_filters, int fft_size, int sample_rate,
                             double f_min, double f_max) {
  if (num_filters < 1) throw std::invalid_argument("MelFilterbank: need at least one filter");
  spectrum_bins_ = fft_size / 2 + 1;
  if (f_max <= 0.0) f_max = sample_rate / 2.0;

  const double mel_lo = hz_to_mel(f_min);
  const double mel_hi = hz_to_mel(f_max);
  std::vector<double> edges(num_filters + 2);
  for (int i = 0; i < num_filters + 2; ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (num_filters + 1));
  }

  const double hz_per_bin = static_cast<double>(sample_rate) / fft_size;
  for (int f = 0; f < num_filters; ++f) {
    const double lo = edges[f], mid = edges[f + 1], hi = edges[f + 2];
    Filter filt;
    filt.first_bin = -1;
    for (int b = 0; b < spectrum_bins_; ++b) {
      const double freq = b * hz_per_bin;
      double w = 0.0;
      if (freq > lo && freq < hi) {
        w = freq <= mid ? (freq - lo) / (mid - lo) : (hi - freq) / (hi - mid);
      }
      if (w > 0.0) {
        if (filt.first_bin < 0) filt.first_bin = b;
        filt.weights.push_back(w);
      } else if (filt.first_bin >= 0) {
        break;  // triangular support is contiguous
      }
    }
    if (filt.first_bin < 0 || filt.weights.empty()) {
      throw std::invalid_argument(
          "MelFilterbank: filter " + std::to_string(f) +
          " covers no FFT bins (too many filters for this resolution)");
    }
    filters_.push_back(std::move(filt));
  }
}

std::vector<double> MelFilterbank::apply(std::span<const double> magnitudes) const {
  if (static_cast<int>(magnitudes.size()) != spectrum_bins_) {
    throw std::invalid_argument("MelFilterbank::apply: expected " +
                                std::to_string(spectrum_bins_) + " bins, got " +
                                std::to_string(magnitudes.size()));
  }
  std::vector<double> energies(filters_.size(), 0.0);
  for (size_t f = 0; f < filters_.size(); ++f) {
    const auto& filt = filters_[f];
    double acc = 0.0;
    for (size_t i = 0; i < filt.weights.size(); ++i) {
      acc += filt.weights[i] * magnitudes[filt.first_bin + i];
    }
    energies[f] = acc;
  }
  return energies;
}

MfccVector mfcc(std::span<const double> window, int sample_rate, const MfccConfig& cfg) {
  if (static_cast<int>(window.size()) < cfg.mel_filters) {
    throw std::invalid_argument("mfcc: window shorter than filter count");
  }
  const int n_fft = cfg.fft_size != 0 ? cfg.fft_size : next_pow2(static_cast<int>(window.size()));
  const auto mags = magnitude_spectrum(window, n_fft, WindowFn::Hann);
  MelFilterbank bank(cfg.mel_filters, n_fft, sample_rate);
  const auto energies = bank.apply(mags);
  const auto log_e = log_compress(energies, cfg.log_floor);

  // Orthonormal DCT-II. Coefficient 0 carries overall level; by default it is
  // skipped and coefficients 1..coeff_count are returned.
  const int j_count = static_cast<int>(log_e.size());
  const int first = cfg.include_c0 ? 0 : 1;
  MfccVector coeffs(cfg.coeff_count, 0.0);
  for (int c = 0; c < cfg.coeff_count; ++c) {
    const int k = first + c;
    if (k >= j_count) break;
    double acc = 0.0;
    for (int j = 0; j < j_count; ++j) {
      acc += log_e[j] * std::cos(M_PI * k * (j + 0.5) / j_count);
    }
    const double scale = k == 0 ? std::sqrt(1.0 / j_count) : std::sqrt(2.0 / j_count);
    coeffs[c] = scale * acc;
  }
  return coeffs;
}

std::string freq_reduction_name(FreqReduction r) {
  switch (r) {
    case FreqReduction::None: return "none";
    case FreqReduction::Linear: return "linear";
    case FreqReduction::Mel: return "mel";
  }
  throw std::logic_error("unreachable reduction");
}

FreqReduction freq_reduction_from_name(const std::string& name) {
  if (name == "none") return FreqReduction::None;
  if (name == "linear") return FreqReduction::Linear;
  if (name == "mel") return FreqReduction::Mel;
  throw std::invalid_argument("unknown frequency reduction: " + name);
}

std::vector<double> reduce_bins_linear(std::span<const double> magnitudes, int out_bins) {
  const auto n = static_cast<int>(magnitudes.size());
  if (out_bins < 1 || out_bins > n) {
    throw std::invalid_argument("reduce_bins_linear: out_bins must be in [1, input bins]");
  }
  std::vector<double> out(out_bins, 0.0);
  for (int g = 0; g < out_bins; ++g) {
    const int lo = static_cast<int>(static_cast<int64_t>(g) * n / out_bins);
    const int hi = static_cast<int>(static_cast<int64_t>(g + 1) * n / out_bins);
    double acc = 0.0;
    for (int b = lo; b < hi; ++b) acc += magnitudes[b];
    out[g] = acc / (hi - lo);
  }
  return out;
}

void write_tfm(const std::string& path, const Eigen::MatrixXd& values,
               const nlohmann::json& cfg, const std::string& config_hash) {
  std::string out;
  out.reserve(20 + static_cast<size_t>(values.size()) * 8);
  out.append("TFM1");
  put_u64_le(out, static_cast<uint64_t>(values.rows()));
  put_u64_le(out, static_cast<uint64_t>(values.cols()));
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      put_f64_le(out, values(r, c));
    }
  }
  write_file_bytes(path, out);

  nlohmann::json sidecar = {{"cfg", cfg}, {"config_hash", config_hash}};
  write_file_bytes(path + ".json", sidecar.dump(2) + "\n");
}

TfmFile read_tfm(const std::string& path, bool require_sidecar, const std::string& expected_hash) {
  const std::string bytes = read_file_bytes(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 20 || std::memcmp(p, "TFM1", 4) != 0) {
    throw IoError("not a TFM container (bad magic): " + path);
  }
  const uint64_t rows = get_u64_le(p + 4);
  const uint64_t cols = get_u64_le(p + 12);
  const uint64_t expected = 20 + rows * cols * 8;
  if (bytes.size() != expected) {
    throw IoError("corrupted TFM container (expected " + std::to_string(expected) +
                  " bytes, found " + std::to_string(bytes.size()) + "): " + path);
  }
  TfmFile tfm;
  tfm.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const unsigned char* d = p + 20;
  for (uint64_t r = 0; r < rows; ++r) {
    for (uint64_t c = 0; c < cols; ++c) {
      tfm.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = get_f64_le(d);
      d += 8;
    }
  }

  const std::string sidecar_path = path + ".json";
  if (std::filesystem::exists(sidecar_path)) {
    nlohmann::json j = nlohmann::json::parse(read_file_bytes(sidecar_path));
    tfm.cfg = j.value("cfg", nlohmann::json::object());
    tfm.config_hash = j.value("config_hash", "");
  } else if (require_sidecar) {
    throw IoError("missing TFM sidecar: " + sidecar_path);
  }
  if (!expected_hash.empty() && tfm.config_hash != expected_hash) {
    throw ConfigError("TFM config hash mismatch for " + path + " (expected " + expected_hash +
                      ", found " + tfm.config_hash + ")");
  }
  return tfm;
}

}  // namespace orbitsig
