// orbitsig/transforms.cc

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

#include "orbitsig/transforms.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace orbitsig {

std::string transform_kind_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::TimeWarp: return "time_warp";
    case TransformKind::CyclicShift: return "cyclic_shift";
    case TransformKind::PitchShift: return "pitch_shift";
  }
  throw std::logic_error("unreachable transform kind");
}

TransformKind transform_kind_from_name(const std::string& name) {
  if (name == "time_warp") return TransformKind::TimeWarp;
  if (name == "cyclic_shift") return TransformKind::CyclicShift;
  if (name == "pitch_shift") return TransformKind::PitchShift;
  throw std::invalid_argument("unknown transform kind: " + name);
}

void TransformSpec::validate() const {
  if (parameters.empty()) {
    throw std::invalid_argument("TransformSpec: parameter list must be non-empty");
  }
  std::set<double> distinct(parameters.begin(), parameters.end());
  if (distinct.size() != parameters.size()) {
    throw std::invalid_argument("TransformSpec: parameters must be distinct");
  }
  for (double p : parameters) {
    if (!std::isfinite(p)) throw std::invalid_argument("TransformSpec: non-finite parameter");
    if (kind == TransformKind::TimeWarp && p <= -1.0) {
      throw std::invalid_argument("TransformSpec: warp parameter must be > -1");
    }
  }
}

nlohmann::json TransformSpec::to_json() const {
  return {{"kind", transform_kind_name(kind)}, {"parameters", parameters}};
}

TransformSpec TransformSpec::from_json(const nlohmann::json& j) {
  TransformSpec spec;
  spec.kind = transform_kind_from_name(j.at("kind").get<std::string>());
  spec.parameters = j.at("parameters").get<std::vector<double>>();
  spec.validate();
  return spec;
}

TransformSpec warp_grid(int count, double range) {
  if (count < 1 || range <= 0.0 || range >= 1.0) {
    throw std::invalid_argument("warp_grid: need count >= 1 and range in (0, 1)");
  }
  TransformSpec spec;
  spec.kind = TransformKind::TimeWarp;
  if (count == 1) {
    spec.parameters = {0.0};
  } else {
    for (int i = 0; i < count; ++i) {
      spec.parameters.push_back(-range + 2.0 * range * i / (count - 1));
    }
  }
  spec.validate();
  return spec;
}

TransformSpec shift_grid(int lo, int hi, int step, TransformKind kind) {
  if (step <= 0 || lo > hi) throw std::invalid_argument("shift_grid: need step > 0 and lo <= hi");
  TransformSpec spec;
  spec.kind = kind;
  for (int s = lo; s <= hi; s += step) spec.parameters.push_back(static_cast<double>(s));
  spec.validate();
  return spec;
}

std::vector<double> time_warp(std::span<const double> x, double epsilon) {
  if (x.empty()) throw std::invalid_argument("time_warp: empty signal");
  if (!std::isfinite(epsilon)) throw std::invalid_argument("time_warp: non-finite epsilon");
  if (epsilon <= -1.0) throw std::invalid_argument("time_warp: epsilon must be > -1");

  const size_t n = x.size();
  std::vector<double> out(n, 0.0);
  const double rate = 1.0 + epsilon;
  const double last = static_cast<double>(n - 1);
  for (size_t i = 0; i < n; ++i) {
    const double pos = rate * static_cast<double>(i);
    if (pos > last) break;  // zero-extension; pos is increasing in i
    const auto i0 = static_cast<size_t>(pos);
    const double frac = pos - static_cast<double>(i0);
    if (frac == 0.0) {
      out[i] = x[i0];
    } else {
      out[i] = (1.0 - frac) * x[i0] + frac * x[i0 + 1];
    }
  }
  return out;
}

std::vector<double> cyclic_shift(std::span<const double> x, long long k) {
  const auto n = static_cast<long long>(x.size());
  std::vector<double> out(x.size());
  if (n == 0) return out;
  long long r = ((-k) % n + n) % n;  // out[i] = x[(i - k) mod n]
  for (long long i = 0; i < n; ++i) {
    out[i] = x[(i + r) % n];
  }
  return out;
}

std::vector<double> pitch_shift_frame(std::span<const double> bins, int shift_bins, double fill) {
  const auto n = static_cast<int>(bins.size());
  if (std::abs(shift_bins) >= n) {
    throw std::invalid_argument("pitch_shift_frame: |shift| " + std::to_string(shift_bins) +
                                " out of range for " + std::to_string(n) + " bins");
  }
  std::vector<double> out(bins.size(), fill);
  for (int i = 0; i < n; ++i) {
    const int src = i - shift_bins;
    if (src >= 0 && src < n) out[i] = bins[src];
  }
  return out;
}

std::vector<std::vector<double>> apply_orbit(std::span<const double> x,
                                             const TransformSpec& spec,
                                             double pitch_fill) {
  spec.validate();
  std::vector<std::vector<double>> members;
  members.reserve(spec.parameters.size());
  for (double p : spec.parameters) {
    switch (spec.kind) {
      case TransformKind::TimeWarp:
        members.push_back(time_warp(x, p));
        break;
      case TransformKind::CyclicShift:
        members.push_back(cyclic_shift(x, static_cast<long long>(std::llround(p))));
        break;
      case TransformKind::PitchShift:
        members.push_back(pitch_shift_frame(x, static_cast<int>(std::llround(p)), pitch_fill));
        break;
    }
  }
  return members;
}

std::vector<double> resample_linear(std::span<const double> x, int sr_in, int sr_out) {
  if (x.empty()) throw std::invalid_argument("resample_linear: empty signal");
  if (sr_in <= 0 || sr_out <= 0) throw std::invalid_argument("resample_linear: bad sample rates");
  if (sr_in == sr_out) return {x.begin(), x.end()};

  const auto n_out = static_cast<size_t>(
      std::llround(static_cast<double>(x.size()) * sr_out / sr_in));
  std::vector<double> out(std::max<size_t>(n_out, 1), 0.0);
  const double step = static_cast<double>(sr_in) / sr_out;
  const double last = static_cast<double>(x.size() - 1);
  for (size_t i = 0; i < out.size(); ++i) {
    const double pos = step * static_cast<double>(i);
    if (pos >= last) {
      out[i] = x.back();
      continue;
    }
    const auto i0 = static_cast<size_t>(pos);
    const double frac = pos - static_cast<double>(i0);
    out[i] = (1.0 - frac) * x[i0] + frac * x[i0 + 1];
  }
  return out;
}

}  // namespace orbitsig
