// src/neuralcore/layers.cpp

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

#include "lid/layers.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lid::nn {

namespace {

using ConstRowMap = Eigen::Map<const RowMatrixXd>;
using RowMap = Eigen::Map<RowMatrixXd>;

// Unfolds one [C, T] sample into [C*K, T-K+1]: row c*K+k holds x[c, k:k+T'].
void Im2Col(const Tensor::ConstMatrixMap& x, Index width, RowMatrixXd& col) {
  const Index out_len = x.cols() - width + 1;
  for (Index c = 0; c < x.rows(); ++c) {
    for (Index k = 0; k < width; ++k) {
      col.row(c * width + k) = x.row(c).segment(k, out_len);
    }
  }
}

void Col2ImAdd(const RowMatrixXd& col, Index width, Tensor::MatrixMap x) {
  const Index out_len = col.cols();
  for (Index c = 0; c < x.rows(); ++c) {
    for (Index k = 0; k < width; ++k) {
      x.row(c).segment(k, out_len) += col.row(c * width + k);
    }
  }
}

void CheckConvInput(const Tensor& x, const Conv1dState& state) {
  RequireRank(x, 3, "conv1d");
  if (x.dim(1) != state.in_channels()) {
    throw DimensionError("conv1d: input has " + std::to_string(x.dim(1)) +
                         " channels, layer expects " + std::to_string(state.in_channels()));
  }
  if (x.dim(2) < state.width()) {
    throw InputTooShortError("conv1d: input length " + std::to_string(x.dim(2)) +
                             " is shorter than kernel width " + std::to_string(state.width()));
  }
}

}  // namespace

Tensor Conv1dForward(const Tensor& x, const Conv1dState& state) {
  CheckConvInput(x, state);
  const Index batch = x.dim(0);
  const Index width = state.width();
  const Index out_len = x.dim(2) - width + 1;
  const Index out_ch = state.out_channels();
  const ConstRowMap w(state.weight.value.data(), out_ch, state.in_channels() * width);
  const auto& bias = state.bias.value.values();

  Tensor y({batch, out_ch, out_len});
  RowMatrixXd col(state.in_channels() * width, out_len);
  for (Index b = 0; b < batch; ++b) {
    Im2Col(x.Sample(b), width, col);
    auto yb = y.Sample(b);
    yb.noalias() = w * col;
    yb.colwise() += bias;
  }
  return y;
}

Tensor Conv1dBackward(const Tensor& x, const Tensor& grad_out, Conv1dState& state,
                      bool need_input_grad) {
  CheckConvInput(x, state);
  const Index batch = x.dim(0);
  const Index width = state.width();
  const Index out_len = x.dim(2) - width + 1;
  const Index out_ch = state.out_channels();
  if (grad_out.shape() != Tensor::Shape{batch, out_ch, out_len}) {
    throw DimensionError("conv1d backward: gradient shape " + Tensor::ShapeString(grad_out.shape()));
  }
  const Index rows = state.in_channels() * width;
  const ConstRowMap w(state.weight.value.data(), out_ch, rows);
  RowMap dw(state.weight.grad.data(), out_ch, rows);
  auto& db = state.bias.grad.values();

  Tensor dx;
  if (need_input_grad) dx = Tensor(x.shape());
  RowMatrixXd col(rows, out_len);
  RowMatrixXd dcol(rows, out_len);
  for (Index b = 0; b < batch; ++b) {
    const auto dy = grad_out.Sample(b);
    Im2Col(x.Sample(b), width, col);
    dw.noalias() += dy * col.transpose();
    db += dy.rowwise().sum();
    if (need_input_grad) {
      dcol.noalias() = w.transpose() * dy;
      Col2ImAdd(dcol, width, dx.Sample(b));
    }
  }
  return dx;
}

Tensor BatchNormForward(const Tensor& x, BatchNormState& state, Mode mode,
                        BatchNormCache* cache, bool update_running, Index stat_items) {
  if (mode == Mode::kInfer) return BatchNormInfer(x, state);

  RequireRank(x, 3, "batchnorm1d");
  const Index batch = x.dim(0);
  const Index channels = x.dim(1);
  const Index steps = x.dim(2);
  if (channels != state.channels()) {
    throw DimensionError("batchnorm1d: channel count mismatch");
  }
  if (stat_items < 0 || stat_items > batch) {
    throw DimensionError("batchnorm1d: statistics from " + std::to_string(stat_items) + " of " +
                         std::to_string(batch) + " items");
  }
  const Index stats = stat_items == 0 ? batch : stat_items;
  const Index n = stats * steps;
  if (n < 2) throw DimensionError("batchnorm1d: train mode needs at least 2 values per channel");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(channels);
  for (Index b = 0; b < stats; ++b) mean += x.Sample(b).rowwise().sum();
  mean /= static_cast<double>(n);

  Eigen::VectorXd var = Eigen::VectorXd::Zero(channels);
  for (Index b = 0; b < stats; ++b) {
    var += (x.Sample(b).colwise() - mean).array().square().matrix().rowwise().sum();
  }
  var /= static_cast<double>(n);

  const Eigen::VectorXd inv_std = (var.array() + state.eps).rsqrt().matrix();
  const auto& gamma = state.gamma.value.values();
  const auto& beta = state.beta.value.values();

  Tensor normalized(x.shape());
  Tensor y(x.shape());
  for (Index b = 0; b < batch; ++b) {
    auto xh = normalized.Sample(b);
    xh = (x.Sample(b).colwise() - mean).array().colwise() * inv_std.array();
    y.Sample(b) = (xh.array().colwise() * gamma.array()).colwise() + beta.array();
  }

  if (update_running) {
    const double m = state.momentum;
    const double unbiased = static_cast<double>(n) / static_cast<double>(n - 1);
    state.running_mean = (1.0 - m) * state.running_mean + m * mean;
    state.running_var = (1.0 - m) * state.running_var + (m * unbiased) * var;
  }
  if (cache != nullptr) {
    cache->normalized = std::move(normalized);
    cache->inv_std = inv_std;
    cache->stat_items = stats;
  }
  return y;
}

Tensor BatchNormInfer(const Tensor& x, const BatchNormState& state) {
  RequireRank(x, 3, "batchnorm1d");
  if (x.dim(1) != state.channels()) {
    throw DimensionError("batchnorm1d: channel count mismatch");
  }
  const Eigen::ArrayXd scale =
      state.gamma.value.values().array() * (state.running_var.array() + state.eps).rsqrt();
  const Eigen::ArrayXd shift = state.beta.value.values().array() - state.running_mean.array() * scale;
  Tensor y(x.shape());
  for (Index b = 0; b < x.dim(0); ++b) {
    y.Sample(b) = (x.Sample(b).array().colwise() * scale).colwise() + shift;
  }
  return y;
}

Tensor BatchNormBackward(const Tensor& grad_out, const BatchNormCache& cache,
                         BatchNormState& state) {
  const Tensor& xh = cache.normalized;
  if (grad_out.shape() != xh.shape()) {
    throw DimensionError("batchnorm1d backward: gradient shape mismatch");
  }
  const Index batch = xh.dim(0);
  const Index channels = xh.dim(1);
  const Index stats = cache.stat_items == 0 ? batch : cache.stat_items;
  const double n = static_cast<double>(stats * xh.dim(2));

  Eigen::VectorXd sum_dy = Eigen::VectorXd::Zero(channels);
  Eigen::VectorXd sum_dy_xh = Eigen::VectorXd::Zero(channels);
  for (Index b = 0; b < batch; ++b) {
    const auto dy = grad_out.Sample(b);
    sum_dy += dy.rowwise().sum();
    sum_dy_xh += dy.cwiseProduct(xh.Sample(b)).rowwise().sum();
  }
  state.gamma.grad.values() += sum_dy_xh;
  state.beta.grad.values() += sum_dy;

  // dx = gamma * inv_std / n * (n*dy - sum(dy) - x_hat * sum(dy*x_hat)), the
  // sums running over the whole batch. Items outside the statistics set do
  // not move the mean or variance and keep only the n*dy term.
  const Eigen::ArrayXd coeff = state.gamma.value.values().array() * cache.inv_std.array() / n;
  Tensor dx(xh.shape());
  for (Index b = 0; b < batch; ++b) {
    auto out = dx.Sample(b);
    if (b < stats) {
      out = ((n * grad_out.Sample(b).array()).colwise() - sum_dy.array()) -
            (xh.Sample(b).array().colwise() * sum_dy_xh.array());
    } else {
      out = n * grad_out.Sample(b).array();
    }
    out = out.array().colwise() * coeff;
  }
  return dx;
}

Tensor Relu(const Tensor& x) {
  Tensor y(x.shape(), x.values().cwiseMax(0.0));
  return y;
}

Tensor ReluBackward(const Tensor& y, const Tensor& grad_out) {
  if (y.shape() != grad_out.shape()) throw DimensionError("relu backward: shape mismatch");
  Tensor dx(y.shape(), (y.values().array() > 0.0).select(grad_out.values(), 0.0).matrix());
  return dx;
}

MaxPoolResult GlobalMaxPool(const Tensor& x) {
  RequireRank(x, 3, "global_max_pool");
  const Index batch = x.dim(0);
  const Index channels = x.dim(1);
  const Index steps = x.dim(2);
  if (steps < 1) throw DimensionError("global_max_pool: empty time axis");

  MaxPoolResult r;
  r.output = Tensor({batch, channels});
  r.argmax.resize(static_cast<std::size_t>(batch * channels));
  r.time_steps = steps;
  for (Index b = 0; b < batch; ++b) {
    const auto xb = x.Sample(b);
    for (Index c = 0; c < channels; ++c) {
      Index best = 0;
      double best_value = xb(c, 0);
      for (Index t = 1; t < steps; ++t) {
        if (xb(c, t) > best_value) {
          best_value = xb(c, t);
          best = t;
        }
      }
      r.output(b, c) = best_value;
      r.argmax[static_cast<std::size_t>(b * channels + c)] = best;
    }
  }
  return r;
}

Tensor GlobalMaxPoolBackward(const Tensor& grad_out, const MaxPoolResult& pooled) {
  if (grad_out.shape() != pooled.output.shape()) {
    throw DimensionError("global_max_pool backward: shape mismatch");
  }
  const Index batch = grad_out.dim(0);
  const Index channels = grad_out.dim(1);
  Tensor dx({batch, channels, pooled.time_steps});
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < channels; ++c) {
      dx(b, c, pooled.argmax[static_cast<std::size_t>(b * channels + c)]) = grad_out(b, c);
    }
  }
  return dx;
}

Tensor LinearForward(const Tensor& x, const LinearState& state) {
  RequireRank(x, 2, "linear");
  if (x.dim(1) != state.in_features()) {
    throw DimensionError("linear: input has " + std::to_string(x.dim(1)) + " features, layer expects " +
                         std::to_string(state.in_features()));
  }
  Tensor y({x.dim(0), state.out_features()});
  auto ym = y.Matrix();
  ym.noalias() = x.Matrix() * state.weight.value.Matrix().transpose();
  ym.rowwise() += state.bias.value.values().transpose();
  return y;
}

Tensor LinearBackward(const Tensor& x, const Tensor& grad_out, LinearState& state,
                      bool need_input_grad) {
  RequireRank(x, 2, "linear backward");
  if (grad_out.shape() != Tensor::Shape{x.dim(0), state.out_features()}) {
    throw DimensionError("linear backward: gradient shape mismatch");
  }
  const auto dy = grad_out.Matrix();
  state.weight.grad.Matrix().noalias() += dy.transpose() * x.Matrix();
  state.bias.grad.values() += dy.colwise().sum().transpose();
  if (!need_input_grad) return {};
  Tensor dx(x.shape());
  dx.Matrix().noalias() = dy * state.weight.value.Matrix();
  return dx;
}

Tensor Softmax(const Tensor& logits) {
  RequireRank(logits, 2, "softmax");
  Tensor p(logits.shape());
  auto pm = p.Matrix();
  const auto z = logits.Matrix();
  for (Index i = 0; i < z.rows(); ++i) {
    const double zmax = z.row(i).maxCoeff();
    pm.row(i) = (z.row(i).array() - zmax).exp().matrix();
    pm.row(i) /= pm.row(i).sum();
  }
  return p;
}

LossAndGrad SoftmaxCrossEntropy(const Tensor& logits, std::span<const int> labels) {
  RequireRank(logits, 2, "softmax_cross_entropy");
  const Index rows = logits.dim(0);
  const Index classes = logits.dim(1);
  if (static_cast<Index>(labels.size()) != rows) {
    throw DimensionError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(rows) + " rows");
  }
  const auto z = logits.Matrix();
  LossAndGrad out;
  out.grad = Tensor(logits.shape());
  auto g = out.grad.Matrix();
  double total = 0.0;
  for (Index i = 0; i < rows; ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= classes) {
      throw DataError("softmax_cross_entropy: label " + std::to_string(label) + " outside [0, " +
                      std::to_string(classes) + ")");
    }
    const double zmax = z.row(i).maxCoeff();
    const Eigen::RowVectorXd e = (z.row(i).array() - zmax).exp().matrix();
    const double sum = e.sum();
    total += std::log(sum) + zmax - z(i, label);
    g.row(i) = e / sum;
    g(i, label) -= 1.0;
  }
  const double inv_rows = 1.0 / static_cast<double>(rows);
  out.loss = total * inv_rows;
  g *= inv_rows;
  return out;
}

Tensor GradientReversalBackward(const Tensor& grad_out, double lambda) {
  return Tensor(grad_out.shape(), -lambda * grad_out.values());
}

namespace {

void HeUniform(Parameter& weight, Index fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  auto& w = weight.value.values();
  for (Index i = 0; i < w.size(); ++i) w[i] = rng.Uniform(-bound, bound);
}

}  // namespace

void InitParameters(Conv1dState& state, Rng& rng) {
  HeUniform(state.weight, state.in_channels() * state.width(), rng);
  state.bias.value.SetZero();
}

void InitParameters(LinearState& state, Rng& rng) {
  HeUniform(state.weight, state.in_features(), rng);
  state.bias.value.SetZero();
}

void InitParameters(BatchNormState& state) {
  state.gamma.value.values().setOnes();
  state.beta.value.SetZero();
  state.running_mean.setZero();
  state.running_var.setOnes();
}

}  // namespace lid::nn
