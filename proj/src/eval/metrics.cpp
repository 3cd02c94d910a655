// src/eval/metrics.cpp

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

#include "lid/metrics.hpp"

#include "lid/error.hpp"

namespace lid::eval {

ConfusionMatrix::ConfusionMatrix(int num_classes) {
  if (num_classes < 1) throw ConfigError("confusion matrix needs at least one class");
  counts_.setZero(num_classes, num_classes);
}

ConfusionMatrix ConfusionMatrix::FromPairs(std::span<const int> truth, std::span<const int> predicted,
                                           int num_classes) {
  if (truth.size() != predicted.size()) {
    throw DimensionError("confusion matrix: " + std::to_string(truth.size()) + " labels vs " +
                         std::to_string(predicted.size()) + " predictions");
  }
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.Add(truth[i], predicted[i]);
  return cm;
}

void ConfusionMatrix::Add(int truth, int predicted) {
  const int k = num_classes();
  if (truth < 0 || truth >= k || predicted < 0 || predicted >= k) {
    throw DataError("confusion matrix: class index outside [0, " + std::to_string(k) + ")");
  }
  ++counts_(truth, predicted);
}

double Accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw DataError("accuracy: empty confusion matrix");
  return static_cast<double>(cm.counts().diagonal().sum()) / static_cast<double>(total);
}

double BalancedAccuracy(const ConfusionMatrix& cm) {
  double sum = 0.0;
  for (int k = 0; k < cm.num_classes(); ++k) {
    const auto row = cm.RowTotal(k);
    if (row == 0) throw DataError("balanced accuracy: class " + std::to_string(k) + " has no true examples");
    sum += static_cast<double>(cm(k, k)) / static_cast<double>(row);
  }
  return sum / cm.num_classes();
}

Eigen::VectorXd F1PerClass(const ConfusionMatrix& cm) {
  Eigen::VectorXd f1(cm.num_classes());
  for (int k = 0; k < cm.num_classes(); ++k) {
    const auto tp = static_cast<double>(cm(k, k));
    const auto predicted = static_cast<double>(cm.ColTotal(k));
    const auto actual = static_cast<double>(cm.RowTotal(k));
    const double precision = predicted > 0 ? tp / predicted : 0.0;
    const double recall = actual > 0 ? tp / actual : 0.0;
    f1[k] = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }
  return f1;
}

}  // namespace lid::eval
