// orbitsig/template-bank.cc

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

#include "orbitsig/template-bank.h"

#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

#include "orbitsig/util.h"

namespace orbitsig {

namespace {
constexpr double kUnitNormTol = 1e-9;
constexpr double kDegenerateNorm = 1e-12;
}  // namespace

void TemplateOrbit::validate() const {
  spec.validate();
  if (members.rows() != static_cast<Eigen::Index>(spec.parameters.size())) {
    throw std::invalid_argument("TemplateOrbit: member count != parameter count");
  }
  if (members.cols() == 0) throw std::invalid_argument("TemplateOrbit: zero dimension");
  for (Eigen::Index m = 0; m < members.rows(); ++m) {
    const double norm = members.row(m).norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kUnitNormTol) {
      throw std::invalid_argument("TemplateOrbit: member " + std::to_string(m) +
                                  " is not unit-norm (norm=" + std::to_string(norm) + ")");
    }
  }
}

void TemplateBank::validate() const {
  if (orbits.empty()) throw std::invalid_argument("TemplateBank: no orbits");
  const int d = orbits.front().dim();
  const auto kind = orbits.front().spec.kind;
  std::map<int64_t, int> ids;
  for (const auto& orbit : orbits) {
    orbit.validate();
    if (orbit.dim() != d) throw std::invalid_argument("TemplateBank: mixed dimensions");
    if (orbit.spec.kind != kind) throw std::invalid_argument("TemplateBank: mixed transform kinds");
    if (++ids[orbit.template_id] > 1) {
      throw std::invalid_argument("TemplateBank: duplicate template_id " +
                                  std::to_string(orbit.template_id));
    }
  }
}

Eigen::MatrixXd TemplateBank::stacked() const {
  const int k = orbit_count();
  const int m = members_per_orbit();
  Eigen::MatrixXd all(static_cast<Eigen::Index>(k) * m, dim());
  for (int i = 0; i < k; ++i) {
    all.middleRows(static_cast<Eigen::Index>(i) * m, m) = orbits[i].members;
  }
  return all;
}

std::vector<SampledTemplate> sample_templates(const DatasetManifest& train, int K,
                                              const FeatureProvider& provider, uint64_t seed) {
  if (K < 1) throw std::invalid_argument("sample_templates: K must be >= 1");
  if (train.entries.empty()) throw std::invalid_argument("sample_templates: empty training set");

  Rng rng(splitmix64(seed ^ 0x7f4a7c15e3779b97ULL));

  // Track draws first, then frame draws, so the stream does not depend on
  // which tracks end up distinct.
  std::vector<size_t> track_of(K);
  for (int k = 0; k < K; ++k) track_of[k] = rng.uniform_index(train.entries.size());

  std::map<size_t, size_t> frame_counts;
  for (int k = 0; k < K; ++k) {
    const size_t t = track_of[k];
    if (frame_counts.count(t)) continue;
    const auto vecs = provider(train.entries[t]);
    if (vecs.empty()) {
      throw std::runtime_error("sample_templates: provider yielded no vectors for track '" +
                               train.entries[t].track_id + "'");
    }
    frame_counts[t] = vecs.size();
  }

  std::vector<size_t> frame_of(K);
  for (int k = 0; k < K; ++k) frame_of[k] = rng.uniform_index(frame_counts.at(track_of[k]));

  // Extraction pass, one provider call per distinct track.
  std::map<size_t, std::vector<int>> wanted;  // track -> template indices
  for (int k = 0; k < K; ++k) wanted[track_of[k]].push_back(k);

  std::vector<SampledTemplate> out(K);
  for (const auto& [t, ks] : wanted) {
    const auto vecs = provider(train.entries[t]);
    if (vecs.size() != frame_counts.at(t)) {
      throw std::runtime_error("sample_templates: provider is not deterministic for track '" +
                               train.entries[t].track_id + "'");
    }
    for (int k : ks) {
      out[k].vec = vecs[frame_of[k]];
      out[k].source_track = train.entries[t].track_id;
    }
  }
  return out;
}

TemplateOrbit finalize_orbit(std::vector<Eigen::VectorXd> raw_members, TransformSpec spec) {
  spec.validate();
  if (raw_members.size() != spec.parameters.size()) {
    throw std::invalid_argument("finalize_orbit: member/parameter count mismatch");
  }
  TemplateOrbit orbit;
  orbit.spec = std::move(spec);
  orbit.members.resize(static_cast<Eigen::Index>(raw_members.size()), raw_members.front().size());
  for (size_t m = 0; m < raw_members.size(); ++m) {
    if (raw_members[m].size() != raw_members.front().size()) {
      throw std::invalid_argument("finalize_orbit: mixed member dimensions");
    }
    const double norm = raw_members[m].norm();
    if (!std::isfinite(norm) || norm < kDegenerateNorm) {
      throw std::runtime_error("finalize_orbit: degenerate member at parameter " +
                               std::to_string(orbit.spec.parameters[m]) + " (norm " +
                               std::to_string(norm) + ")");
    }
    orbit.members.row(static_cast<Eigen::Index>(m)) = raw_members[m] / norm;
  }
  return orbit;
}

TemplateOrbit build_orbit(const Eigen::VectorXd& tmpl, const TransformSpec& spec,
                          const RepresentationFn& rep, double pitch_fill) {
  spec.validate();
  if (tmpl.size() == 0 || !tmpl.allFinite()) {
    throw std::invalid_argument("build_orbit: template must be non-empty and finite");
  }
  const std::vector<double> raw(tmpl.data(), tmpl.data() + tmpl.size());
  const auto transformed = apply_orbit(raw, spec, pitch_fill);

  std::vector<Eigen::VectorXd> members;
  members.reserve(transformed.size());
  for (const auto& t : transformed) {
    if (rep) {
      members.push_back(rep(t));
    } else {
      members.push_back(Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size())));
    }
  }
  return finalize_orbit(std::move(members), spec);
}

void save_bank(const std::string& path, const TemplateBank& bank) {
  bank.validate();
  if (bank.config_hash.size() != 64) {
    throw std::invalid_argument("save_bank: config_hash must be 64 hex chars");
  }
  const uint64_t k = bank.orbit_count();
  const uint64_t m = bank.members_per_orbit();
  const uint64_t d = bank.dim();
  for (const auto& orbit : bank.orbits) {
    if (orbit.size() != static_cast<int>(m)) {
      throw std::invalid_argument("save_bank: orbits must share member count");
    }
  }

  nlohmann::json meta;
  meta["layer_tag"] = bank.layer_tag;
  meta["transform"] = bank.orbits.front().spec.to_json();
  meta["orbits"] = nlohmann::json::array();
  for (const auto& orbit : bank.orbits) {
    meta["orbits"].push_back({{"template_id", orbit.template_id},
                              {"source_track", orbit.source_track}});
  }
  const std::string blob = meta.dump();

  std::string out;
  out.reserve(4 + 8 * 4 + blob.size() + k * m * d * 8 + 32);
  out.append("TBK1");
  put_u64_le(out, k);
  put_u64_le(out, m);
  put_u64_le(out, d);
  put_u64_le(out, blob.size());
  out.append(blob);
  for (const auto& orbit : bank.orbits) {
    for (Eigen::Index r = 0; r < orbit.members.rows(); ++r) {
      for (Eigen::Index c = 0; c < orbit.members.cols(); ++c) {
        put_f64_le(out, orbit.members(r, c));
      }
    }
  }
  for (size_t i = 0; i < 64; i += 2) {
    out.push_back(static_cast<char>(std::stoi(bank.config_hash.substr(i, 2), nullptr, 16)));
  }
  write_file_bytes(path, out);
}

TemplateBank load_bank(const std::string& path, const std::string& expected_config_hash) {
  const std::string bytes = read_file_bytes(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 36 || std::memcmp(p, "TBK1", 4) != 0) {
    throw IoError("not a template bank (bad magic): " + path);
  }
  const uint64_t k = get_u64_le(p + 4);
  const uint64_t m = get_u64_le(p + 12);
  const uint64_t d = get_u64_le(p + 20);
  const uint64_t blob_len = get_u64_le(p + 28);
  const uint64_t expected_size = 36 + blob_len + k * m * d * 8 + 32;
  if (k == 0 || m == 0 || d == 0 || bytes.size() != expected_size) {
    throw IoError("corrupted template bank (expected " + std::to_string(expected_size) +
                  " bytes, found " + std::to_string(bytes.size()) + "): " + path);
  }

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(bytes.substr(36, blob_len));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("corrupted template bank metadata in " + path + ": " + e.what());
  }

  TemplateBank bank;
  bank.layer_tag = meta.value("layer_tag", "");
  TransformSpec spec = TransformSpec::from_json(meta.at("transform"));
  if (spec.parameters.size() != m) {
    throw IoError("template bank spec/member count mismatch: " + path);
  }
  const auto& orbit_meta = meta.at("orbits");
  if (orbit_meta.size() != k) throw IoError("template bank orbit metadata mismatch: " + path);

  const unsigned char* data = p + 36 + blob_len;
  for (uint64_t i = 0; i < k; ++i) {
    TemplateOrbit orbit;
    orbit.template_id = orbit_meta[i].at("template_id").get<int64_t>();
    orbit.source_track = orbit_meta[i].at("source_track").get<std::string>();
    orbit.spec = spec;
    orbit.members.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    for (uint64_t r = 0; r < m; ++r) {
      for (uint64_t c = 0; c < d; ++c) {
        orbit.members(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = get_f64_le(data);
        data += 8;
      }
    }
    bank.orbits.push_back(std::move(orbit));
  }

  static const char* hex = "0123456789abcdef";
  bank.config_hash.clear();
  for (int i = 0; i < 32; ++i) {
    const unsigned char b = data[i];
    bank.config_hash.push_back(hex[b >> 4]);
    bank.config_hash.push_back(hex[b & 0xf]);
  }

  try {
    bank.validate();
  } catch (const std::exception& e) {
    throw IoError("template bank fails invariants on load (" + std::string(e.what()) +
                  "): " + path);
  }
  if (!expected_config_hash.empty() && bank.config_hash != expected_config_hash) {
    throw ConfigError("template bank config hash mismatch for " + path + " (expected " +
                      expected_config_hash + ", found " + bank.config_hash + ")");
  }
  return bank;
}

}  // namespace orbitsig
