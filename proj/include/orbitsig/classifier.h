// orbitsig/classifier.h

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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "orbitsig/signal-io.h"

namespace orbitsig {

// One-vs-rest regularized linear least squares on z-scored features with
// {-1,+1} targets.
struct RidgeModel {
  Eigen::MatrixXd W;  // feature_dim x class_count
  Eigen::VectorXd b;  // class_count (target class priors)
  double lambda = 0.0;
  int feature_dim = 0;
  int class_count = 0;
  Eigen::VectorXd mean;       // per-dimension, fit on training data
  Eigen::VectorXd inv_scale;  // 0 for dropped (constant) dimensions
  int dropped_dims = 0;
};

// Solves (X~' X~ + lambda I) W = X~' Y on standardized features via a
// symmetric positive-definite factorization. Constant feature dimensions are
// dropped with a warning on stderr.
RidgeModel train_ridge(const Eigen::MatrixXd& X, std::span<const int> labels, int class_count,
                       double lambda);

Eigen::VectorXd decision_scores(const RidgeModel& model, const Eigen::VectorXd& feature);

// argmax of the per-class scores; ties break to the lowest class index.
int predict_frame(const RidgeModel& model, const Eigen::VectorXd& feature);

std::vector<int> predict_frames(const RidgeModel& model, const Eigen::MatrixXd& X);

// Most frequent label; ties break to the lowest class index.
int majority_vote(std::span<const int> frame_labels);

// 5-fold cross-validation over a lambda grid on training frames only; returns
// the grid value with the lowest mean frame error (ties to the smaller
// lambda).
double select_lambda_cv(const Eigen::MatrixXd& X, std::span<const int> labels, int class_count,
                        std::span<const double> grid, int folds, uint64_t seed);

struct FrameRecord {
  std::string track_id;
  int frame_index = 0;
  int predicted = 0;
  int truth = 0;
};

struct EvalReport {
  double frame_error_rate = 0.0;
  double track_error_rate = 0.0;
  std::vector<std::vector<int>> confusion;  // [true][predicted], track counts
  std::vector<double> per_class_accuracy;   // track level
  std::vector<std::string> class_names;
  nlohmann::json config_summary;
  std::vector<FrameRecord> frame_log;

  nlohmann::json to_json() const;
  std::string to_text_table() const;
  std::string frame_csv() const;
};

// Per-track feature matrices keyed by manifest entry; lets callers plug in
// extraction, caching, or precomputed features.
using TrackFeatureFn = std::function<Eigen::MatrixXd(const ManifestEntry&)>;

// Trains on all training frames, classifies every test frame, majority-votes
// per track, and fills the report.
EvalReport evaluate(const DatasetManifest& train, const DatasetManifest& test,
                    const TrackFeatureFn& features, double lambda,
                    nlohmann::json config_summary = {});

}  // namespace orbitsig
