// orbitsig/template-bank.h

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

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "orbitsig/signal-io.h"
#include "orbitsig/transforms.h"

namespace orbitsig {

// One template's transformed copies, unit-normalized, one row per parameter.
struct TemplateOrbit {
  int64_t template_id = 0;
  std::string source_track;
  Eigen::MatrixXd members;  // M x d, rows have unit Euclidean norm
  TransformSpec spec;

  int size() const { return static_cast<int>(members.rows()); }
  int dim() const { return static_cast<int>(members.cols()); }
  void validate() const;
};

struct TemplateBank {
  std::vector<TemplateOrbit> orbits;
  std::string layer_tag;
  std::string config_hash;  // hex sha-256 of the producing configuration

  int orbit_count() const { return static_cast<int>(orbits.size()); }
  int members_per_orbit() const { return orbits.empty() ? 0 : orbits.front().size(); }
  int dim() const { return orbits.empty() ? 0 : orbits.front().dim(); }
  void validate() const;

  // All members stacked into a (K*M) x d matrix, orbit-major. Used for
  // batched projection.
  Eigen::MatrixXd stacked() const;
};

// Yields the candidate template vectors of one track (frames or deeper-layer
// representations, depending on the consuming layer).
using FeatureProvider = std::function<std::vector<Eigen::VectorXd>(const ManifestEntry&)>;

struct SampledTemplate {
  Eigen::VectorXd vec;
  std::string source_track;
};

// Draws K templates: track uniform (with replacement across templates), then
// one of its vectors uniform. Each distinct track's provider output is
// materialized at most twice (a counting pass and an extraction pass).
std::vector<SampledTemplate> sample_templates(const DatasetManifest& train, int K,
                                              const FeatureProvider& provider, uint64_t seed);

// Post-transform mapping into the representation space the consuming layer
// projects in (for warp orbits: raw audio -> base-layer frame).
using RepresentationFn = std::function<Eigen::VectorXd(const std::vector<double>&)>;

// Transforms the template per spec parameter, optionally maps through `rep`,
// and unit-normalizes. A member with norm below 1e-12 is rejected with the
// offending parameter in the message.
TemplateOrbit build_orbit(const Eigen::VectorXd& tmpl, const TransformSpec& spec,
                          const RepresentationFn& rep = nullptr, double pitch_fill = 0.0);

// Normalization + validation shared by build_orbit and bank builders that
// construct members directly.
TemplateOrbit finalize_orbit(std::vector<Eigen::VectorXd> raw_members, TransformSpec spec);

// --- TBK container ----------------------------------------------------------
// magic "TBK1"; u64 K, M, d; u64 json length; JSON blob (transform spec,
// layer tag, per-orbit metadata); K*M*d float64 LE (orbit-major, row-major
// members); 32 raw bytes of config hash.

void save_bank(const std::string& path, const TemplateBank& bank);

// Verifies structure and invariants. When expected_config_hash is non-empty a
// mismatch is refused.
TemplateBank load_bank(const std::string& path, const std::string& expected_config_hash = "");

}  // namespace orbitsig
