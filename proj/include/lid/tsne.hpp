// include/lid/tsne.hpp

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

#ifndef LID_TSNE_HPP_
#define LID_TSNE_HPP_

#include <cstdint>

#include "lid/rng.hpp"
#include "lid/tensor.hpp"

namespace lid::viz {

struct ProjectionConfig {
  double perplexity = 30.0;
  int iterations = 1000;
  double learning_rate = 200.0;
  double exaggeration = 12.0;
  int exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch = 250;
  std::uint64_t seed = 0;
  /// Points sampled from each domain by the projection pipeline.
  int samples_per_domain = 1800;
};

/// Largest point count the exact O(N^2) algorithm accepts.
inline constexpr Index kMaxTsnePoints = 5000;

/// Squared Euclidean distances between rows, [N, N], zero diagonal.
Eigen::MatrixXd SquaredDistances(const Eigen::Ref<const RowMatrixXd>& x);

/// Row-conditional affinities p_{j|i} with each row's Gaussian precision found
/// by bisection so that its entropy is within 1e-5 nats of log(perplexity).
Eigen::MatrixXd ConditionalAffinities(const Eigen::MatrixXd& sq_dist, double perplexity);

/// (P + P^T) / 2N; sums to 1.
Eigen::MatrixXd SymmetrizeAffinities(const Eigen::MatrixXd& conditional);

/// Student-t low-dimensional affinities of y [N, 2].
Eigen::MatrixXd LowDimAffinities(const Eigen::Ref<const RowMatrixXd>& y);

double KlDivergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q);

/// Exact duplicate rows receive independent N(0, 1e-10^2) perturbations.
/// Returns the number of rows changed.
Index JitterDuplicates(RowMatrixXd& x, Rng& rng);

/// Throws ConfigError unless 3 * perplexity < n - 1 and n <= kMaxTsnePoints.
void CheckFeasible(Index n, double perplexity);

struct TsneResult {
  RowMatrixXd coords;  // [N, 2]
  double initial_kl = 0.0;
  double final_kl = 0.0;
};

/// Exact t-SNE: Gaussian N(0, 1e-4^2) initialization, gradient descent with
/// momentum and per-coordinate gains, early exaggeration. KL values are
/// computed against the unexaggerated P.
TsneResult Tsne(const Eigen::Ref<const RowMatrixXd>& points, const ProjectionConfig& cfg);

}  // namespace lid::viz

#endif  // LID_TSNE_HPP_
