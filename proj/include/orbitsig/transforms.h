// orbitsig/transforms.h

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

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace orbitsig {

enum class TransformKind { TimeWarp, CyclicShift, PitchShift };

std::string transform_kind_name(TransformKind kind);
TransformKind transform_kind_from_name(const std::string& name);

// The sampled transformation set: one parameter per orbit member. Warp
// parameters are speed factors epsilon (> -1); shifts are integer-valued.
struct TransformSpec {
  TransformKind kind = TransformKind::TimeWarp;
  std::vector<double> parameters;

  void validate() const;

  nlohmann::json to_json() const;
  static TransformSpec from_json(const nlohmann::json& j);
};

// Uniform grid of `count` warp factors on [-range, range]; includes 0 when
// count is odd.
TransformSpec warp_grid(int count, double range);

// Integer shifts lo, lo+step, ..., up to hi inclusive.
TransformSpec shift_grid(int lo, int hi, int step, TransformKind kind = TransformKind::PitchShift);

// out[i] = x evaluated at position (1+epsilon)*i by linear interpolation;
// positions past the last sample give 0. Output length == input length, and
// epsilon = 0 returns a bit-identical copy.
std::vector<double> time_warp(std::span<const double> x, double epsilon);

// out[i] = x[(i - k) mod n].
std::vector<double> cyclic_shift(std::span<const double> x, long long k);

// Translate frequency bins by shift_bins; vacated bins take `fill` (the log
// floor value when operating on log spectra). |shift_bins| must be < size.
std::vector<double> pitch_shift_frame(std::span<const double> bins, int shift_bins, double fill);

// One transformed copy per parameter, in parameter order. `pitch_fill` is the
// fill value forwarded to pitch_shift_frame.
std::vector<std::vector<double>> apply_orbit(std::span<const double> x,
                                             const TransformSpec& spec,
                                             double pitch_fill = 0.0);

// Linear-interpolation resampler. Output length round(n * sr_out / sr_in).
std::vector<double> resample_linear(std::span<const double> x, int sr_in, int sr_out);

}  // namespace orbitsig
