// include/lid/evaluation.hpp

// Copyright 2026  The lidda Authors
//
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

#ifndef LID_EVALUATION_HPP_
#define LID_EVALUATION_HPP_

#include <span>
#include <string>
#include <vector>

#include "lid/corpus.hpp"
#include "lid/features.hpp"
#include "lid/metrics.hpp"
#include "lid/model.hpp"

namespace lid::eval {

/// Segment-level predictions, computed in inference mode `batch_size` items at a time.
std::vector<int> PredictAll(const model::LidModel& model, std::span<const RowMatrixXd> features,
                            std::size_t batch_size = 64);

/// Last-hidden-layer rows (input to the final language layer), [N, hidden].
Tensor HiddenRepresentations(const model::LidModel& model, std::span<const RowMatrixXd> features,
                             std::size_t batch_size = 64);

/// Pooled conv-block output f, [N, filters[2]].
Tensor ConvRepresentations(const model::LidModel& model, std::span<const RowMatrixXd> features,
                           std::size_t batch_size = 64);

struct EvalReport {
  std::string train_domain;
  std::string eval_domain;
  frontend::FeatureKind kind = frontend::FeatureKind::kMfsc;
  model::Variant variant = model::Variant::kNone;
  std::vector<std::string> languages;
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  Eigen::VectorXd f1;
  ConfusionMatrix confusion{1};
  /// Balanced accuracy minus the same model's in-domain balanced accuracy.
  double delta = 0.0;

  bool in_domain() const { return train_domain == eval_domain; }
};

EvalReport Evaluate(const model::LidModel& model, const corpus::FeatureDataset& data,
                    const corpus::LabelSet& labels, std::size_t batch_size = 64);

/// A trained checkpoint and what it was trained on.
struct TrainedModel {
  std::string train_domain;
  frontend::FeatureKind kind = frontend::FeatureKind::kMfsc;
  model::Variant variant = model::Variant::kNone;
  const model::LidModel* model = nullptr;
};

/// Evaluation features of one domain.
struct EvalSet {
  std::string domain;
  frontend::FeatureKind kind = frontend::FeatureKind::kMfsc;
  const corpus::FeatureDataset* data = nullptr;
};

/// Evaluates every model on its own domain and on every other domain of the
/// same feature kind. Output order: models in input order, in-domain first.
/// Throws DataError when a model has no in-domain set or an eval set's
/// features are of a different kind than declared.
std::vector<EvalReport> CrossDomainEval(std::span<const TrainedModel> models, std::span<const EvalSet> sets,
                                        const corpus::LabelSet& labels, std::size_t batch_size = 64);

/// Machine-readable form of a report set.
std::string ReportsToJson(std::span<const EvalReport> reports);

/// Aligned text table, one row per (model, out-of-domain set):
/// train domain, features, variant, in-domain %, OOD %, delta.
std::string FormatTable(std::span<const EvalReport> reports);

/// Per-class F1 (%) breakdown of each report.
std::string FormatF1Table(std::span<const EvalReport> reports);

}  // namespace lid::eval

#endif  // LID_EVALUATION_HPP_
