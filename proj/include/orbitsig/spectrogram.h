// orbitsig/spectrogram.h

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

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "orbitsig/signal-io.h"

namespace orbitsig {

enum class WindowFn { Hann, Rectangular };

// Real-to-complex FFT for a fixed power-of-two size. One instance per thread;
// plan execution reuses internal buffers.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(Fft&& other) noexcept;
  Fft& operator=(Fft&&) = delete;
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }
  // out must hold n/2 + 1 values.
  void forward(std::span<const double> in, std::complex<double>* out);

 private:
  int n_ = 0;
  void* plan_ = nullptr;
  double* in_buf_ = nullptr;
  void* out_buf_ = nullptr;
};

int next_pow2(int n);

// Magnitudes |X_k| of the first fft_size/2 + 1 DFT bins of the windowed,
// zero-padded input. fft_size must be a power of two >= the window length.
std::vector<double> magnitude_spectrum(std::span<const double> window, int fft_size,
                                       WindowFn win = WindowFn::Hann);
// Plan-reusing variant for tight loops.
std::vector<double> magnitude_spectrum(Fft& fft, std::span<const double> window,
                                       WindowFn win = WindowFn::Hann);

// Elementwise log(x + floor). Input must be finite and >= 0.
std::vector<double> log_compress(std::span<const double> magnitudes, double floor_value);

struct SpectrogramConfig {
  double window_ms = 370.0;
  double hop_ms = 185.0;
  int fft_size = 0;  // 0 = next power of two >= window samples
  double log_floor = 1e-6;
  WindowFn window = WindowFn::Hann;

  int resolve_fft_size(int window_samples) const;
};

struct TimeFreqMatrix {
  Eigen::MatrixXd values;  // frames x bins, log magnitude
  std::vector<double> bin_freqs;
  std::vector<double> frame_times;
};

TimeFreqMatrix log_spectrogram(const AudioClip& clip, const SpectrogramConfig& cfg);

// Triangular mel filterbank over FFT magnitude bins, 0 Hz .. Nyquist.
class MelFilterbank {
 public:
  MelFilterbank(int num_filters, int fft_size, int sample_rate,
                double f_min = 0.0, double f_max = 0.0 /* 0 = Nyquist */);

  int num_filters() const { return static_cast<int>(filters_.size()); }
  // Filter energies of a magnitude spectrum (fft_size/2 + 1 bins).
  std::vector<double> apply(std::span<const double> magnitudes) const;

  static double hz_to_mel(double hz);
  static double mel_to_hz(double mel);

 private:
  struct Filter {
    int first_bin;
    std::vector<double> weights;
  };
  std::vector<Filter> filters_;
  int spectrum_bins_;
};

struct MfccConfig {
  int mel_filters = 40;
  int coeff_count = 13;     // number of returned coefficients
  bool include_c0 = false;  // when false, coefficients 1..coeff_count are returned
  double log_floor = 1e-6;
  int fft_size = 0;  // 0 = auto
};

using MfccVector = std::vector<double>;

// DCT-II (orthonormal) of log mel-filterbank energies over a Hann window.
MfccVector mfcc(std::span<const double> window, int sample_rate, const MfccConfig& cfg);

// Frequency-axis reduction applied to magnitude spectra before log
// compression, to bound template/signature dimensionality.
enum class FreqReduction { None, Linear, Mel };

std::string freq_reduction_name(FreqReduction r);
FreqReduction freq_reduction_from_name(const std::string& name);

// Averages the spectrum into out_bins contiguous groups of near-equal width.
std::vector<double> reduce_bins_linear(std::span<const double> magnitudes, int out_bins);

// --- TFM container ---------------------------------------------------------
// Flat binary: magic "TFM1", u64 rows, u64 cols (little-endian), then
// row-major float64 little-endian. A sidecar UTF-8 JSON file at <path>.json
// carries the producing cfg and a config hash.

void write_tfm(const std::string& path, const Eigen::MatrixXd& values,
               const nlohmann::json& cfg, const std::string& config_hash);

struct TfmFile {
  Eigen::MatrixXd values;
  nlohmann::json cfg;
  std::string config_hash;
};

// Reads the matrix; when require_sidecar is true the sidecar must exist and
// parse. If expected_hash is non-empty, a mismatch is an error.
TfmFile read_tfm(const std::string& path, bool require_sidecar = true,
                 const std::string& expected_hash = "");

}  // namespace orbitsig
