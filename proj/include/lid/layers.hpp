// include/lid/layers.hpp

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

#ifndef LID_LAYERS_HPP_
#define LID_LAYERS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "lid/rng.hpp"
#include "lid/tensor.hpp"

namespace lid::nn {

/// A trainable tensor with its gradient buffer and Adam moments, all of the
/// same shape as `value`.
struct Parameter {
  Tensor value;
  Tensor grad;
  Tensor first_moment;
  Tensor second_moment;

  Parameter() = default;
  explicit Parameter(Tensor::Shape shape)
      : value(shape), grad(shape), first_moment(shape), second_moment(std::move(shape)) {}

  void ZeroGrad() { grad.SetZero(); }
  Index size() const { return value.size(); }
};

/// weight [C_out, C_in, K], bias [C_out].
struct Conv1dState {
  Parameter weight;
  Parameter bias;

  Conv1dState() = default;
  Conv1dState(Index in_channels, Index out_channels, Index width)
      : weight({out_channels, in_channels, width}), bias({out_channels}) {}

  Index in_channels() const { return weight.value.dim(1); }
  Index out_channels() const { return weight.value.dim(0); }
  Index width() const { return weight.value.dim(2); }
};

/// weight [out, in], bias [out].
struct LinearState {
  Parameter weight;
  Parameter bias;

  LinearState() = default;
  LinearState(Index in_features, Index out_features)
      : weight({out_features, in_features}), bias({out_features}) {}

  Index in_features() const { return weight.value.dim(1); }
  Index out_features() const { return weight.value.dim(0); }
};

/// Per-channel batch normalization over (batch, time).
struct BatchNormState {
  Parameter gamma;
  Parameter beta;
  Eigen::VectorXd running_mean;
  Eigen::VectorXd running_var;
  double momentum = 0.1;
  double eps = 1e-5;

  BatchNormState() = default;
  explicit BatchNormState(Index channels)
      : gamma({channels}),
        beta({channels}),
        running_mean(Eigen::VectorXd::Zero(channels)),
        running_var(Eigen::VectorXd::Ones(channels)) {
    gamma.value.values().setOnes();
  }

  Index channels() const { return gamma.value.size(); }
};

enum class Mode { kTrain, kInfer };

// ---------------------------------------------------------------------------
// conv1d: valid convolution, stride 1.

/// x [B, C_in, T] -> [B, C_out, T - K + 1].
Tensor Conv1dForward(const Tensor& x, const Conv1dState& state);

/// Accumulates weight/bias grads into `state` and returns dL/dx, or an empty
/// tensor when `need_input_grad` is false.
Tensor Conv1dBackward(const Tensor& x, const Tensor& grad_out, Conv1dState& state,
                      bool need_input_grad = true);

// ---------------------------------------------------------------------------
// batchnorm1d

/// Values saved by the train-mode forward pass for the backward pass.
struct BatchNormCache {
  Tensor normalized;           // x_hat
  Eigen::VectorXd inv_std;     // 1 / sqrt(var + eps), per channel
  Index stat_items = 0;        // leading batch items the statistics came from
};

/// x [B, C, T]. In train mode normalizes with batch statistics and, when
/// `update_running` is set, folds them into the running estimates (running
/// variance uses the unbiased batch variance). The statistics come from the
/// first `stat_items` batch items (0 = all of them) and are applied to every
/// item. Infer mode uses the running estimates and leaves `cache` untouched.
Tensor BatchNormForward(const Tensor& x, BatchNormState& state, Mode mode,
                        BatchNormCache* cache, bool update_running = true, Index stat_items = 0);

/// Read-only inference path.
Tensor BatchNormInfer(const Tensor& x, const BatchNormState& state);

/// Backward of the train-mode pass; accumulates gamma/beta grads.
Tensor BatchNormBackward(const Tensor& grad_out, const BatchNormCache& cache,
                         BatchNormState& state);

// ---------------------------------------------------------------------------
// relu

Tensor Relu(const Tensor& x);

/// Uses the forward *output* as the mask source (y > 0).
Tensor ReluBackward(const Tensor& y, const Tensor& grad_out);

// ---------------------------------------------------------------------------
// global max pool over time

struct MaxPoolResult {
  Tensor output;                   // [B, C]
  std::vector<Index> argmax;       // B*C time indices, first maximum on ties
  Index time_steps = 0;
};

MaxPoolResult GlobalMaxPool(const Tensor& x);

Tensor GlobalMaxPoolBackward(const Tensor& grad_out, const MaxPoolResult& pooled);

// ---------------------------------------------------------------------------
// linear

/// x [B, in] -> [B, out].
Tensor LinearForward(const Tensor& x, const LinearState& state);

Tensor LinearBackward(const Tensor& x, const Tensor& grad_out, LinearState& state,
                      bool need_input_grad = true);

// ---------------------------------------------------------------------------
// softmax / cross-entropy

/// Row-wise softmax of [B, K] logits, max-subtracted.
Tensor Softmax(const Tensor& logits);

struct LossAndGrad {
  double loss = 0.0;
  Tensor grad;
};

/// Mean over rows of -log softmax(logits)[label]; grad = (softmax - onehot)/B.
LossAndGrad SoftmaxCrossEntropy(const Tensor& logits, std::span<const int> labels);

// ---------------------------------------------------------------------------
// gradient reversal

/// Identity.
inline Tensor GradientReversalForward(const Tensor& x) { return x; }

/// -lambda * grad, element-wise.
Tensor GradientReversalBackward(const Tensor& grad_out, double lambda);

// ---------------------------------------------------------------------------
// initialization

/// He-uniform weights U(-a, a), a = sqrt(6 / fan_in) so Var = 2 / fan_in;
/// zero bias.
void InitParameters(Conv1dState& state, Rng& rng);
void InitParameters(LinearState& state, Rng& rng);

/// gamma = 1, beta = 0, running mean 0, running var 1.
void InitParameters(BatchNormState& state);

}  // namespace lid::nn

#endif  // LID_LAYERS_HPP_
