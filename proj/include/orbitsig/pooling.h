// orbitsig/pooling.h

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
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "orbitsig/template-bank.h"

namespace orbitsig {

// How projections onto one orbit are pooled into statistics: raw moments
// (1/M) sum p^n per order n, or smoothed CDF bins
// (1/M) sum sigmoid(beta * (p + n*delta)) for n = 1..bins.
struct PoolingSpec {
  enum class Kind { Moments, SigmoidCdf };

  Kind kind = Kind::Moments;
  std::vector<int> orders;  // Moments
  int bins = 0;             // SigmoidCdf
  double delta = 0.0;
  double beta = 0.0;

  static PoolingSpec moments(std::vector<int> orders);
  // delta <= 0 picks the default grid 2 / (bins + 1), spanning [-1, 1].
  static PoolingSpec sigmoid_cdf(int bins, double delta = 0.0, double beta = 20.0);

  int stat_count() const;
  void validate() const;

  nlohmann::json to_json() const;
  static PoolingSpec from_json(const nlohmann::json& j);
};

// Normalized projections <x/|x|, member_m> for every orbit member, clamped to
// [-1, 1]. Rejects zero input and dimension mismatches.
Eigen::VectorXd project(const Eigen::VectorXd& x, const TemplateOrbit& orbit);

// Raw (non-central) moments of the projection values, one per order.
Eigen::VectorXd pool_moments(const Eigen::VectorXd& projections, const std::vector<int>& orders);

// Smoothed empirical-CDF bins; non-decreasing in the bin index.
Eigen::VectorXd pool_sigmoid_cdf(const Eigen::VectorXd& projections, int bins, double delta,
                                 double beta);

struct SignatureLayout {
  std::vector<int64_t> template_ids;
  int stats_per_template = 0;

  // Flat index of statistic s of template k.
  int coord(int k, int s) const { return k * stats_per_template + s; }
};

struct Signature {
  Eigen::VectorXd values;  // length K * stats_per_template
  SignatureLayout layout;
};

// Concatenated pooled statistics over all bank orbits.
Signature signature(const Eigen::VectorXd& x, const TemplateBank& bank, const PoolingSpec& spec);

// Batched signatures, one input per row. Holds the stacked bank; build once
// and reuse across tracks. An exactly zero row yields an all-zero signature
// row (the pipeline silence convention) instead of the error project() would
// raise.
class BankProjector {
 public:
  BankProjector(const TemplateBank& bank, PoolingSpec spec);

  int input_dim() const { return static_cast<int>(stacked_.cols()); }
  int output_dim() const { return orbit_count_ * spec_.stat_count(); }
  const PoolingSpec& spec() const { return spec_; }

  Eigen::MatrixXd signatures(const Eigen::MatrixXd& rows) const;

 private:
  Eigen::MatrixXd stacked_;  // (K*M) x d
  int orbit_count_;
  int members_per_orbit_;
  PoolingSpec spec_;
};

}  // namespace orbitsig
