// include/lid/metrics.hpp

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

#ifndef LID_METRICS_HPP_
#define LID_METRICS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lid::eval {

/// K×K counts; rows are true classes, columns predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes);

  static ConfusionMatrix FromPairs(std::span<const int> truth, std::span<const int> predicted,
                                   int num_classes);

  void Add(int truth, int predicted);

  int num_classes() const { return static_cast<int>(counts_.rows()); }
  std::int64_t operator()(int truth, int predicted) const { return counts_(truth, predicted); }
  std::int64_t total() const { return counts_.sum(); }
  std::int64_t RowTotal(int truth) const { return counts_.row(truth).sum(); }
  std::int64_t ColTotal(int predicted) const { return counts_.col(predicted).sum(); }
  const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts() const { return counts_; }

 private:
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts_;
};

/// Fraction of correct predictions.
double Accuracy(const ConfusionMatrix& cm);

/// Mean per-class recall. Throws DataError naming the first class with no
/// true examples.
double BalancedAccuracy(const ConfusionMatrix& cm);

/// 2PR / (P + R) per class, 0 when P + R = 0.
Eigen::VectorXd F1PerClass(const ConfusionMatrix& cm);

}  // namespace lid::eval

#endif  // LID_METRICS_HPP_
