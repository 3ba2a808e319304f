// orbitsig/pooling.cc

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

#include "orbitsig/pooling.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace orbitsig {

PoolingSpec PoolingSpec::moments(std::vector<int> orders) {
  PoolingSpec spec;
  spec.kind = Kind::Moments;
  spec.orders = std::move(orders);
  spec.validate();
  return spec;
}

PoolingSpec PoolingSpec::sigmoid_cdf(int bins, double delta, double beta) {
  PoolingSpec spec;
  spec.kind = Kind::SigmoidCdf;
  spec.bins = bins;
  spec.delta = delta > 0.0 ? delta : 2.0 / (bins + 1);
  spec.beta = beta;
  spec.validate();
  return spec;
}

int PoolingSpec::stat_count() const {
  return kind == Kind::Moments ? static_cast<int>(orders.size()) : bins;
}

void PoolingSpec::validate() const {
  if (kind == Kind::Moments) {
    if (orders.empty()) throw std::invalid_argument("PoolingSpec: moment orders must be non-empty");
    for (int n : orders) {
      if (n < 1) throw std::invalid_argument("PoolingSpec: moment orders must be >= 1");
    }
  } else {
    if (bins < 1) throw std::invalid_argument("PoolingSpec: bin count must be >= 1");
    if (!(delta > 0.0)) throw std::invalid_argument("PoolingSpec: delta must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("PoolingSpec: beta must be > 0");
  }
}

nlohmann::json PoolingSpec::to_json() const {
  if (kind == Kind::Moments) {
    return {{"kind", "moments"}, {"orders", orders}};
  }
  return {{"kind", "sigmoid_cdf"}, {"bins", bins}, {"delta", delta}, {"beta", beta}};
}

PoolingSpec PoolingSpec::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "moments") {
    return moments(j.at("orders").get<std::vector<int>>());
  }
  if (kind == "sigmoid_cdf") {
    return sigmoid_cdf(j.at("bins").get<int>(), j.value("delta", 0.0), j.value("beta", 20.0));
  }
  throw std::invalid_argument("unknown pooling kind: " + kind);
}

Eigen::VectorXd project(const Eigen::VectorXd& x, const TemplateOrbit& orbit) {
  if (x.size() != orbit.members.cols()) {
    throw std::invalid_argument("project: input dim " + std::to_string(x.size()) +
                                " != orbit dim " + std::to_string(orbit.members.cols()));
  }
  const double norm = x.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("project: zero input vector");
  Eigen::VectorXd p = orbit.members * (x / norm);
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], -1.0, 1.0);
  return p;
}

namespace {

inline double int_pow(double x, int n) {
  double acc = 1.0;
  for (int i = 0; i < n; ++i) acc *= x;
  return acc;
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Sequential accumulation over members, one statistic at a time; summation
// order is part of the reproducibility contract.
void pool_into(const double* proj, int m, const PoolingSpec& spec, double* out) {
  if (spec.kind == PoolingSpec::Kind::Moments) {
    for (size_t s = 0; s < spec.orders.size(); ++s) {
      const int n = spec.orders[s];
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += int_pow(proj[i], n);
      out[s] = acc / m;
    }
  } else {
    for (int b = 1; b <= spec.bins; ++b) {
      double acc = 0.0;
      const double offset = b * spec.delta;
      for (int i = 0; i < m; ++i) acc += logistic(spec.beta * (proj[i] + offset));
      out[b - 1] = acc / m;
    }
  }
}

}  // namespace

Eigen::VectorXd pool_moments(const Eigen::VectorXd& projections, const std::vector<int>& orders) {
  if (projections.size() == 0) throw std::invalid_argument("pool_moments: empty projections");
  PoolingSpec spec = PoolingSpec::moments(orders);
  Eigen::VectorXd out(spec.stat_count());
  pool_into(projections.data(), static_cast<int>(projections.size()), spec, out.data());
  return out;
}

Eigen::VectorXd pool_sigmoid_cdf(const Eigen::VectorXd& projections, int bins, double delta,
                                 double beta) {
  if (projections.size() == 0) throw std::invalid_argument("pool_sigmoid_cdf: empty projections");
  PoolingSpec spec = PoolingSpec::sigmoid_cdf(bins, delta, beta);
  Eigen::VectorXd out(spec.stat_count());
  pool_into(projections.data(), static_cast<int>(projections.size()), spec, out.data());
  return out;
}

Signature signature(const Eigen::VectorXd& x, const TemplateBank& bank, const PoolingSpec& spec) {
  spec.validate();
  const int stats = spec.stat_count();
  Signature sig;
  sig.layout.stats_per_template = stats;
  sig.values.resize(static_cast<Eigen::Index>(bank.orbit_count()) * stats);
  for (int k = 0; k < bank.orbit_count(); ++k) {
    const Eigen::VectorXd p = project(x, bank.orbits[k]);
    pool_into(p.data(), static_cast<int>(p.size()), spec, sig.values.data() + static_cast<size_t>(k) * stats);
    sig.layout.template_ids.push_back(bank.orbits[k].template_id);
  }
  return sig;
}

BankProjector::BankProjector(const TemplateBank& bank, PoolingSpec spec)
    : stacked_(bank.stacked()),
      orbit_count_(bank.orbit_count()),
      members_per_orbit_(bank.members_per_orbit()),
      spec_(std::move(spec)) {
  bank.validate();
  spec_.validate();
}

Eigen::MatrixXd BankProjector::signatures(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != stacked_.cols()) {
    throw std::invalid_argument("BankProjector: input dim " + std::to_string(rows.cols()) +
                                " != bank dim " + std::to_string(stacked_.cols()));
  }
  const Eigen::Index t = rows.rows();
  const int stats = spec_.stat_count();

  // Normalize rows; exactly-silent rows are flagged and emitted as zeros.
  Eigen::MatrixXd normalized = rows;
  std::vector<char> silent(t, 0);
  for (Eigen::Index i = 0; i < t; ++i) {
    const double norm = normalized.row(i).norm();
    if (norm > 0.0) {
      normalized.row(i) /= norm;
    } else {
      silent[i] = 1;
    }
  }

  Eigen::MatrixXd proj = normalized * stacked_.transpose();  // t x (K*M)
  proj = proj.cwiseMax(-1.0).cwiseMin(1.0);

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t, static_cast<Eigen::Index>(orbit_count_) * stats);
  std::vector<double> orbit_proj(members_per_orbit_);
  std::vector<double> stats_buf(stats);
  for (Eigen::Index i = 0; i < t; ++i) {
    if (silent[i]) continue;
    for (int k = 0; k < orbit_count_; ++k) {
      for (int m = 0; m < members_per_orbit_; ++m) {
        orbit_proj[m] = proj(i, static_cast<Eigen::Index>(k) * members_per_orbit_ + m);
      }
      pool_into(orbit_proj.data(), members_per_orbit_, spec_, stats_buf.data());
      for (int s = 0; s < stats; ++s) out(i, static_cast<Eigen::Index>(k) * stats + s) = stats_buf[s];
    }
  }
  return out;
}

}  // namespace orbitsig
