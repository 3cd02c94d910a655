// include/lid/probe.hpp

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

#ifndef LID_PROBE_HPP_
#define LID_PROBE_HPP_

#include <span>
#include <vector>

#include "lid/tensor.hpp"

namespace lid::eval {

struct ProbeConfig {
  /// Weight of (1/2)|w|^2 added to the mean log-loss.
  double l2 = 1e-3;
  int max_iterations = 50;
  /// Newton iterations stop once the step's largest component is below this.
  double tolerance = 1e-10;
};

/// Binary logistic regression on standardized inputs, fitted by Newton's
/// method. Used to test how much domain information a frozen representation
/// still carries.
struct LinearProbe {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;
  Eigen::VectorXd weights;
  double bias = 0.0;

  /// Class-1 scores; positive means class 1.
  Eigen::VectorXd Scores(const Eigen::Ref<const RowMatrixXd>& x) const;
  std::vector<int> Predict(const Eigen::Ref<const RowMatrixXd>& x) const;
};

/// Labels must be 0 or 1 with both present. Throws DataError otherwise.
LinearProbe FitProbe(const Eigen::Ref<const RowMatrixXd>& x, std::span<const int> labels,
                     const ProbeConfig& cfg = {});

/// Balanced accuracy of the probe on held-out rows.
double ProbeBalancedAccuracy(const LinearProbe& probe, const Eigen::Ref<const RowMatrixXd>& x,
                             std::span<const int> labels);

}  // namespace lid::eval

#endif  // LID_PROBE_HPP_
