// src/eval/probe.cpp

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

#include "lid/probe.hpp"

#include <cmath>

#include "lid/error.hpp"
#include "lid/metrics.hpp"

namespace lid::eval {

namespace {

void CheckLabels(Index rows, std::span<const int> labels) {
  if (static_cast<std::size_t>(rows) != labels.size()) {
    throw DimensionError("probe: " + std::to_string(rows) + " rows vs " + std::to_string(labels.size()) +
                         " labels");
  }
}

}  // namespace

Eigen::VectorXd LinearProbe::Scores(const Eigen::Ref<const RowMatrixXd>& x) const {
  if (x.cols() != weights.size()) {
    throw DimensionError("probe: expected " + std::to_string(weights.size()) + " columns, got " +
                         std::to_string(x.cols()));
  }
  const RowMatrixXd z = (x.rowwise() - mean).array().rowwise() / scale.array();
  return (z * weights).array() + bias;
}

std::vector<int> LinearProbe::Predict(const Eigen::Ref<const RowMatrixXd>& x) const {
  const Eigen::VectorXd s = Scores(x);
  std::vector<int> out(static_cast<std::size_t>(s.size()));
  for (Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = s[i] > 0.0 ? 1 : 0;
  return out;
}

LinearProbe FitProbe(const Eigen::Ref<const RowMatrixXd>& x, std::span<const int> labels, const ProbeConfig& cfg) {
  CheckLabels(x.rows(), labels);
  const Index n = x.rows();
  const Index d = x.cols();
  Eigen::VectorXd y(n);
  bool seen[2] = {false, false};
  for (Index i = 0; i < n; ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    if (l != 0 && l != 1) throw DataError("probe: labels must be 0 or 1");
    seen[l] = true;
    y[i] = l;
  }
  if (!seen[0] || !seen[1]) throw DataError("probe: both classes need examples");
  if (!x.allFinite()) throw NumericError("probe: non-finite input");

  LinearProbe probe;
  probe.mean = x.colwise().mean();
  probe.scale = ((x.rowwise() - probe.mean).array().square().colwise().mean()).sqrt();
  probe.scale = (probe.scale.array() < 1e-12).select(1.0, probe.scale);

  // Design matrix with a trailing bias column; the bias is not penalized.
  RowMatrixXd z(n, d + 1);
  z.leftCols(d) = (x.rowwise() - probe.mean).array().rowwise() / probe.scale.array();
  z.col(d).setOnes();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, cfg.l2);
  penalty[d] = 0.0;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const Eigen::VectorXd p = (1.0 / (1.0 + (-(z * theta)).array().exp())).matrix();
    const Eigen::VectorXd grad = z.transpose() * (p - y) / static_cast<double>(n) + penalty.cwiseProduct(theta);
    const Eigen::VectorXd s = (p.array() * (1.0 - p.array())).matrix();
    Eigen::MatrixXd h = z.transpose() * s.asDiagonal() * z / static_cast<double>(n);
    h.diagonal() += penalty;
    h(d, d) += 1e-12;
    const Eigen::VectorXd step = h.ldlt().solve(grad);
    theta -= step;
    if (!theta.allFinite()) throw NumericError("probe: Newton iteration diverged");
    if (step.cwiseAbs().maxCoeff() < cfg.tolerance) break;
  }
  probe.weights = theta.head(d);
  probe.bias = theta[d];
  return probe;
}

double ProbeBalancedAccuracy(const LinearProbe& probe, const Eigen::Ref<const RowMatrixXd>& x,
                             std::span<const int> labels) {
  CheckLabels(x.rows(), labels);
  const auto pred = probe.Predict(x);
  return BalancedAccuracy(ConfusionMatrix::FromPairs(labels, pred, 2));
}

}  // namespace lid::eval
