// src/viz/tsne.cpp

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

#include "lid/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

namespace lid::viz {

namespace {

constexpr double kEntropyTolerance = 1e-5;
constexpr int kMaxBisections = 200;
constexpr double kMinProbability = 1e-12;
constexpr double kInitScale = 1e-4;
constexpr double kJitter = 1e-10;
constexpr double kMinGain = 0.01;

}  // namespace

Eigen::MatrixXd SquaredDistances(const Eigen::Ref<const RowMatrixXd>& x) {
  const Eigen::VectorXd norms = x.rowwise().squaredNorm();
  Eigen::MatrixXd d = -2.0 * (x * x.transpose());
  d.colwise() += norms;
  d.rowwise() += norms.transpose();
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return d;
}

Eigen::MatrixXd ConditionalAffinities(const Eigen::MatrixXd& sq_dist, double perplexity) {
  const Index n = sq_dist.rows();
  const double target = std::log(perplexity);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd row(n);
  for (Index i = 0; i < n; ++i) {
    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    // Distances are shifted by the row minimum; the normalized row is unchanged.
    double dmin = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (j != i) dmin = std::min(dmin, sq_dist(i, j));
    }
    for (int it = 0; it < kMaxBisections; ++it) {
      double sum = 0.0;
      double weighted = 0.0;
      for (Index j = 0; j < n; ++j) {
        row[j] = j == i ? 0.0 : std::exp(-beta * (sq_dist(i, j) - dmin));
        sum += row[j];
        weighted += row[j] * (sq_dist(i, j) - dmin);
      }
      const double entropy = std::log(sum) + beta * weighted / sum;
      row /= sum;
      const double diff = entropy - target;
      if (std::abs(diff) < kEntropyTolerance) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    p.row(i) = row.transpose();
  }
  return p;
}

Eigen::MatrixXd SymmetrizeAffinities(const Eigen::MatrixXd& conditional) {
  const auto n = static_cast<double>(conditional.rows());
  Eigen::MatrixXd p = (conditional + conditional.transpose()) / (2.0 * n);
  return p;
}

Eigen::MatrixXd LowDimAffinities(const Eigen::Ref<const RowMatrixXd>& y) {
  Eigen::MatrixXd num = (1.0 + SquaredDistances(y).array()).inverse().matrix();
  num.diagonal().setZero();
  return num / num.sum();
}

double KlDivergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  double kl = 0.0;
  for (Index j = 0; j < p.cols(); ++j) {
    for (Index i = 0; i < p.rows(); ++i) {
      if (i == j || p(i, j) <= 0.0) continue;
      kl += p(i, j) * std::log(p(i, j) / std::max(q(i, j), kMinProbability));
    }
  }
  return kl;
}

Index JitterDuplicates(RowMatrixXd& x, Rng& rng) {
  std::map<std::vector<double>, Index> seen;
  Index changed = 0;
  for (Index i = 0; i < x.rows(); ++i) {
    std::vector<double> key(x.row(i).data(), x.row(i).data() + x.cols());
    if (seen.emplace(std::move(key), i).second) continue;
    for (Index k = 0; k < x.cols(); ++k) x(i, k) += kJitter * rng.Normal();
    ++changed;
  }
  return changed;
}

void CheckFeasible(Index n, double perplexity) {
  if (!(perplexity > 0.0)) throw ConfigError("tsne: perplexity must be positive");
  if (n > kMaxTsnePoints) {
    throw ConfigError("tsne: " + std::to_string(n) + " points exceeds the exact-algorithm limit of " +
                      std::to_string(kMaxTsnePoints));
  }
  if (!(3.0 * perplexity < static_cast<double>(n - 1))) {
    throw ConfigError("tsne: perplexity " + std::to_string(perplexity) + " is infeasible for " + std::to_string(n) +
                      " points");
  }
}

TsneResult Tsne(const Eigen::Ref<const RowMatrixXd>& points, const ProjectionConfig& cfg) {
  const Index n = points.rows();
  CheckFeasible(n, cfg.perplexity);
  if (cfg.iterations < 0) throw ConfigError("tsne: iterations must be non-negative");
  if (!points.allFinite()) throw NumericError("tsne: non-finite input");

  Rng rng(cfg.seed);
  RowMatrixXd x = points;
  JitterDuplicates(x, rng);
  const Eigen::MatrixXd p = SymmetrizeAffinities(ConditionalAffinities(SquaredDistances(x), cfg.perplexity));

  RowMatrixXd y(n, 2);
  for (Index i = 0; i < n; ++i) {
    y(i, 0) = kInitScale * rng.Normal();
    y(i, 1) = kInitScale * rng.Normal();
  }
  TsneResult result;
  result.initial_kl = KlDivergence(p, LowDimAffinities(y));

  RowMatrixXd velocity = RowMatrixXd::Zero(n, 2);
  RowMatrixXd gains = RowMatrixXd::Ones(n, 2);
  RowMatrixXd grad(n, 2);
  for (int it = 0; it < cfg.iterations; ++it) {
    const double exaggeration = it < cfg.exaggeration_iterations ? cfg.exaggeration : 1.0;
    const double momentum = it < cfg.momentum_switch ? cfg.initial_momentum : cfg.final_momentum;

    Eigen::MatrixXd num = (1.0 + SquaredDistances(y).array()).inverse().matrix();
    num.diagonal().setZero();
    const double z = num.sum();
    // Force matrix W = (exaggeration * P - Q) .* num; grad_i = 4 sum_j W_ij (y_i - y_j).
    const Eigen::MatrixXd w = ((exaggeration * p).array() - num.array() / z) * num.array();
    const Eigen::VectorXd wsum = w.rowwise().sum();
    grad = 4.0 * (wsum.asDiagonal() * y - w * y);

    for (Index i = 0; i < n; ++i) {
      for (Index k = 0; k < 2; ++k) {
        const bool same_sign = (grad(i, k) > 0.0) == (velocity(i, k) > 0.0);
        gains(i, k) = std::max(same_sign ? gains(i, k) * 0.8 : gains(i, k) + 0.2, kMinGain);
      }
    }
    velocity = momentum * velocity - cfg.learning_rate * gains.cwiseProduct(grad);
    y += velocity;
    y.rowwise() -= y.colwise().mean();
    if (!y.allFinite()) throw NumericError("tsne: embedding diverged at iteration " + std::to_string(it));
  }
  result.final_kl = KlDivergence(p, LowDimAffinities(y));
  result.coords = std::move(y);
  return result;
}

}  // namespace lid::viz
