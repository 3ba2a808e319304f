// orbitsig/classifier.cc

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

#include "orbitsig/classifier.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#include "orbitsig/util.h"

namespace orbitsig {

RidgeModel train_ridge(const Eigen::MatrixXd& X, std::span<const int> labels, int class_count,
                       double lambda) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (n == 0 || d == 0) throw std::invalid_argument("train_ridge: empty design matrix");
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw std::invalid_argument("train_ridge: label count != row count");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("train_ridge: lambda must be > 0");
  if (!X.allFinite()) throw std::invalid_argument("train_ridge: non-finite features");

  std::vector<char> seen(class_count, 0);
  for (int y : labels) {
    if (y < 0 || y >= class_count) throw std::invalid_argument("train_ridge: label out of range");
    seen[y] = 1;
  }
  for (int c = 0; c < class_count; ++c) {
    if (!seen[c]) {
      throw std::invalid_argument("train_ridge: class " + std::to_string(c) +
                                  " has no training frames");
    }
  }

  RidgeModel model;
  model.lambda = lambda;
  model.feature_dim = static_cast<int>(d);
  model.class_count = class_count;
  model.mean = X.colwise().mean();
  Eigen::MatrixXd centered = X.rowwise() - model.mean.transpose();
  Eigen::VectorXd stddev = (centered.array().square().colwise().mean()).sqrt();

  model.inv_scale.resize(d);
  model.dropped_dims = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (stddev[j] < 1e-12) {
      model.inv_scale[j] = 0.0;  // constant dimension carries no signal
      ++model.dropped_dims;
    } else {
      model.inv_scale[j] = 1.0 / stddev[j];
    }
  }
  if (model.dropped_dims > 0) {
    std::cerr << "train_ridge: dropped " << model.dropped_dims
              << " constant feature dimension(s)\n";
  }

  Eigen::MatrixXd Xs = centered * model.inv_scale.asDiagonal();
  Eigen::MatrixXd Y = Eigen::MatrixXd::Constant(n, class_count, -1.0);
  for (Eigen::Index i = 0; i < n; ++i) Y(i, labels[i]) = 1.0;

  Eigen::MatrixXd gram = Xs.transpose() * Xs;
  gram.diagonal().array() += lambda;
  model.W = Eigen::LLT<Eigen::MatrixXd>(gram).solve(Xs.transpose() * Y);
  model.b = Y.colwise().mean();

  if (!model.W.allFinite()) throw std::runtime_error("train_ridge: solve produced non-finite weights");
  return model;
}

Eigen::VectorXd decision_scores(const RidgeModel& model, const Eigen::VectorXd& feature) {
  if (feature.size() != model.feature_dim) {
    throw std::invalid_argument("decision_scores: feature dim " + std::to_string(feature.size()) +
                                " != model dim " + std::to_string(model.feature_dim));
  }
  const Eigen::VectorXd xs =
      (feature - model.mean).cwiseProduct(model.inv_scale);
  return model.W.transpose() * xs + model.b;
}

namespace {

int argmax_lowest(const Eigen::VectorXd& scores) {
  int best = 0;
  for (int c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return best;
}

}  // namespace

int predict_frame(const RidgeModel& model, const Eigen::VectorXd& feature) {
  return argmax_lowest(decision_scores(model, feature));
}

std::vector<int> predict_frames(const RidgeModel& model, const Eigen::MatrixXd& X) {
  std::vector<int> out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out[i] = predict_frame(model, X.row(i).transpose());
  }
  return out;
}

int majority_vote(std::span<const int> frame_labels) {
  if (frame_labels.empty()) throw std::invalid_argument("majority_vote: empty label list");
  std::map<int, int> counts;
  for (int y : frame_labels) ++counts[y];
  int best = frame_labels[0];
  int best_count = 0;
  for (const auto& [label, count] : counts) {  // ascending label order -> ties to lowest
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  }
  return best;
}

double select_lambda_cv(const Eigen::MatrixXd& X, std::span<const int> labels, int class_count,
                        std::span<const double> grid, int folds, uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("select_lambda_cv: empty grid");
  if (folds < 2) throw std::invalid_argument("select_lambda_cv: need at least 2 folds");
  const Eigen::Index n = X.rows();

  std::vector<size_t> order(n);
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(splitmix64(seed ^ 0xcf01dULL));
  rng.shuffle(order);

  double best_lambda = grid[0];
  double best_err = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    double errors = 0.0, total = 0.0;
    for (int f = 0; f < folds; ++f) {
      std::vector<size_t> tr, va;
      for (size_t i = 0; i < order.size(); ++i) {
        (static_cast<int>(i % folds) == f ? va : tr).push_back(order[i]);
      }
      if (va.empty() || tr.empty()) continue;
      Eigen::MatrixXd Xtr(tr.size(), X.cols());
      std::vector<int> ytr(tr.size());
      for (size_t i = 0; i < tr.size(); ++i) {
        Xtr.row(i) = X.row(tr[i]);
        ytr[i] = labels[tr[i]];
      }
      // A fold may miss a class entirely; skip such folds.
      std::vector<char> seen(class_count, 0);
      for (int y : ytr) seen[y] = 1;
      if (std::find(seen.begin(), seen.end(), 0) != seen.end()) continue;
      RidgeModel m = train_ridge(Xtr, ytr, class_count, lambda);
      for (size_t i : va) {
        errors += predict_frame(m, X.row(i).transpose()) != labels[i] ? 1.0 : 0.0;
        total += 1.0;
      }
    }
    const double err = total > 0.0 ? errors / total : 1.0;
    if (err < best_err - 1e-12) {
      best_err = err;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["frame_error_rate"] = frame_error_rate;
  j["track_error_rate"] = track_error_rate;
  j["confusion"] = confusion;
  j["per_class_accuracy"] = per_class_accuracy;
  j["class_names"] = class_names;
  j["config"] = config_summary;
  return j;
}

std::string EvalReport::to_text_table() const {
  std::ostringstream os;
  os << "frame error rate: " << frame_error_rate * 100.0 << "%\n";
  os << "track error rate: " << track_error_rate * 100.0 << "%\n\n";
  os << "confusion (rows: true, cols: predicted):\n";
  for (size_t r = 0; r < confusion.size(); ++r) {
    os << "  " << class_names.at(r) << ":";
    for (int v : confusion[r]) os << " " << v;
    os << "\n";
  }
  os << "\nper-class track accuracy:\n";
  for (size_t c = 0; c < per_class_accuracy.size(); ++c) {
    os << "  " << class_names.at(c) << ": " << per_class_accuracy[c] * 100.0 << "%\n";
  }
  return os.str();
}

std::string EvalReport::frame_csv() const {
  std::string out = "track_id,frame_index,predicted,true\n";
  for (const auto& r : frame_log) {
    out += r.track_id + "," + std::to_string(r.frame_index) + "," + std::to_string(r.predicted) +
           "," + std::to_string(r.truth) + "\n";
  }
  return out;
}

EvalReport evaluate(const DatasetManifest& train, const DatasetManifest& test,
                    const TrackFeatureFn& features, double lambda,
                    nlohmann::json config_summary) {
  if (train.class_names != test.class_names) {
    throw std::invalid_argument("evaluate: train/test manifests disagree on classes");
  }
  const int class_count = static_cast<int>(train.class_names.size());

  // Gather training frames.
  std::vector<Eigen::MatrixXd> train_feats;
  Eigen::Index total_rows = 0, dim = 0;
  for (const auto& entry : train.entries) {
    Eigen::MatrixXd f = features(entry);
    if (f.rows() == 0) throw std::runtime_error("evaluate: no frames for track " + entry.track_id);
    if (dim == 0) dim = f.cols();
    if (f.cols() != dim) throw std::runtime_error("evaluate: inconsistent feature dims");
    total_rows += f.rows();
    train_feats.push_back(std::move(f));
  }
  Eigen::MatrixXd X(total_rows, dim);
  std::vector<int> y(total_rows);
  Eigen::Index at = 0;
  for (size_t i = 0; i < train_feats.size(); ++i) {
    X.middleRows(at, train_feats[i].rows()) = train_feats[i];
    std::fill_n(y.begin() + at, train_feats[i].rows(), train.entries[i].label);
    at += train_feats[i].rows();
  }
  train_feats.clear();

  RidgeModel model = train_ridge(X, y, class_count, lambda);

  EvalReport report;
  report.class_names = train.class_names;
  report.config_summary = std::move(config_summary);
  report.confusion.assign(class_count, std::vector<int>(class_count, 0));

  long frame_errors = 0, frame_total = 0, track_errors = 0;
  for (const auto& entry : test.entries) {
    const Eigen::MatrixXd f = features(entry);
    const std::vector<int> preds = predict_frames(model, f);
    for (size_t i = 0; i < preds.size(); ++i) {
      report.frame_log.push_back({entry.track_id, static_cast<int>(i), preds[i], entry.label});
      frame_errors += preds[i] != entry.label ? 1 : 0;
    }
    frame_total += static_cast<long>(preds.size());
    const int voted = majority_vote(preds);
    report.confusion[entry.label][voted] += 1;
    track_errors += voted != entry.label ? 1 : 0;
  }

  report.frame_error_rate = frame_total > 0 ? static_cast<double>(frame_errors) / frame_total : 0.0;
  report.track_error_rate =
      !test.entries.empty() ? static_cast<double>(track_errors) / test.entries.size() : 0.0;
  report.per_class_accuracy.assign(class_count, 0.0);
  for (int c = 0; c < class_count; ++c) {
    int row_total = 0;
    for (int v : report.confusion[c]) row_total += v;
    if (row_total > 0) {
      report.per_class_accuracy[c] = static_cast<double>(report.confusion[c][c]) / row_total;
    }
  }
  return report;
}

}  // namespace orbitsig
