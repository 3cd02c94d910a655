// tests/support/gradcheck.hpp

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

#ifndef LID_TESTS_GRADCHECK_HPP_
#define LID_TESTS_GRADCHECK_HPP_

// Finite-difference checks of each layer's backward pass on a random shape
// drawn from `seed`. Each returns the worst relative error over every
// gradient the layer produces.

#include <algorithm>
#include <vector>

#include "lid/layers.hpp"
#include "oracles.hpp"

namespace lid::testing {

inline Index Draw(Rng& rng, Index lo, Index hi) { return lo + static_cast<Index>(rng.Below(static_cast<std::uint64_t>(hi - lo + 1))); }

inline double CheckConv1d(std::uint64_t seed) {
  Rng rng(seed);
  const Index b = Draw(rng, 1, 3), cin = Draw(rng, 1, 4), cout = Draw(rng, 1, 4), k = Draw(rng, 1, 4);
  const Index t = k + Draw(rng, 0, 5);
  nn::Conv1dState state(cin, cout, k);
  state.weight.value = RandomTensor({cout, cin, k}, seed + 1);
  state.bias.value = RandomTensor({cout}, seed + 2);
  const Tensor x = RandomTensor({b, cin, t}, seed + 3);
  const Tensor r = RandomTensor({b, cout, t - k + 1}, seed + 4);

  const Tensor dx = nn::Conv1dBackward(x, r, state);
  double worst = MaxRelativeError(dx, NumericGradient([&](const Tensor& v) { return Project(nn::Conv1dForward(v, state), r); }, x));
  nn::Conv1dState probe = state;
  worst = std::max(worst, MaxRelativeError(state.weight.grad, NumericGradient([&](const Tensor& w) {
                                             probe.weight.value = w;
                                             return Project(nn::Conv1dForward(x, probe), r);
                                           }, state.weight.value)));
  probe = state;
  worst = std::max(worst, MaxRelativeError(state.bias.grad, NumericGradient([&](const Tensor& bias) {
                                             probe.bias.value = bias;
                                             return Project(nn::Conv1dForward(x, probe), r);
                                           }, state.bias.value)));
  return worst;
}

inline double CheckBatchNorm(std::uint64_t seed) {
  Rng rng(seed);
  const Index b = Draw(rng, 2, 4), c = Draw(rng, 1, 4), t = Draw(rng, 1, 6);
  // Statistics from a leading subset of the batch half of the time.
  Index stats = rng.Below(2) ? Draw(rng, 1, b) : 0;
  if (stats * t < 2) stats = 0;
  nn::BatchNormState state(c);
  state.gamma.value = RandomTensor({c}, seed + 1);
  state.beta.value = RandomTensor({c}, seed + 2);
  const Tensor x = RandomTensor({b, c, t}, seed + 3, 2.0);
  const Tensor r = RandomTensor({b, c, t}, seed + 4);

  auto forward = [stats](const Tensor& v, nn::BatchNormState s) {
    return nn::BatchNormForward(v, s, nn::Mode::kTrain, nullptr, false, stats);
  };
  nn::BatchNormCache cache;
  nn::BatchNormState work = state;
  nn::BatchNormForward(x, work, nn::Mode::kTrain, &cache, false, stats);
  const Tensor dx = nn::BatchNormBackward(r, cache, work);

  double worst = MaxRelativeError(dx, NumericGradient([&](const Tensor& v) { return Project(forward(v, state), r); }, x));
  worst = std::max(worst, MaxRelativeError(work.gamma.grad, NumericGradient([&](const Tensor& g) {
                                             nn::BatchNormState s = state;
                                             s.gamma.value = g;
                                             return Project(forward(x, s), r);
                                           }, state.gamma.value)));
  worst = std::max(worst, MaxRelativeError(work.beta.grad, NumericGradient([&](const Tensor& be) {
                                             nn::BatchNormState s = state;
                                             s.beta.value = be;
                                             return Project(forward(x, s), r);
                                           }, state.beta.value)));
  return worst;
}

inline double CheckLinear(std::uint64_t seed) {
  Rng rng(seed);
  const Index b = Draw(rng, 1, 4), in = Draw(rng, 1, 6), out = Draw(rng, 1, 6);
  nn::LinearState state(in, out);
  state.weight.value = RandomTensor({out, in}, seed + 1);
  state.bias.value = RandomTensor({out}, seed + 2);
  const Tensor x = RandomTensor({b, in}, seed + 3);
  const Tensor r = RandomTensor({b, out}, seed + 4);

  const Tensor dx = nn::LinearBackward(x, r, state);
  double worst = MaxRelativeError(dx, NumericGradient([&](const Tensor& v) { return Project(nn::LinearForward(v, state), r); }, x));
  nn::LinearState probe = state;
  worst = std::max(worst, MaxRelativeError(state.weight.grad, NumericGradient([&](const Tensor& w) {
                                             probe.weight.value = w;
                                             return Project(nn::LinearForward(x, probe), r);
                                           }, state.weight.value)));
  probe = state;
  worst = std::max(worst, MaxRelativeError(state.bias.grad, NumericGradient([&](const Tensor& bias) {
                                             probe.bias.value = bias;
                                             return Project(nn::LinearForward(x, probe), r);
                                           }, state.bias.value)));
  return worst;
}

/// Inputs are a shuffled grid with spacing 0.1, so a step of 1e-5 never
/// changes the argmax.
inline double CheckGlobalMaxPool(std::uint64_t seed) {
  Rng rng(seed);
  const Index b = Draw(rng, 1, 3), c = Draw(rng, 1, 4), t = Draw(rng, 1, 7);
  Tensor x({b, c, t});
  std::vector<double> grid(static_cast<std::size_t>(x.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 0.1 * static_cast<double>(i) - 1.0;
  rng.Shuffle(std::span<double>(grid));
  for (Index i = 0; i < x.size(); ++i) x.values()[i] = grid[static_cast<std::size_t>(i)];
  const Tensor r = RandomTensor({b, c}, seed + 1);
  const Tensor dx = nn::GlobalMaxPoolBackward(r, nn::GlobalMaxPool(x));
  return MaxRelativeError(dx, NumericGradient([&](const Tensor& v) { return Project(nn::GlobalMaxPool(v).output, r); }, x));
}

inline double CheckRelu(std::uint64_t seed) {
  Rng rng(seed);
  const Index b = Draw(rng, 1, 3), c = Draw(rng, 1, 5);
  Tensor x = RandomTensor({b, c}, seed + 1);
  for (Index i = 0; i < x.size(); ++i) {
    if (std::abs(x.values()[i]) < 1e-3) x.values()[i] = 0.5;
  }
  const Tensor r = RandomTensor({b, c}, seed + 2);
  const Tensor dx = nn::ReluBackward(nn::Relu(x), r);
  return MaxRelativeError(dx, NumericGradient([&](const Tensor& v) { return Project(nn::Relu(v), r); }, x));
}

inline double CheckSoftmaxCrossEntropy(std::uint64_t seed) {
  Rng rng(seed);
  const Index b = Draw(rng, 1, 5), k = Draw(rng, 2, 7);
  const Tensor logits = RandomTensor({b, k}, seed + 1, 3.0);
  std::vector<int> labels(static_cast<std::size_t>(b));
  for (auto& l : labels) l = static_cast<int>(rng.Below(static_cast<std::uint64_t>(k)));
  const auto res = nn::SoftmaxCrossEntropy(logits, labels);
  return MaxRelativeError(res.grad, NumericGradient([&](const Tensor& v) { return nn::SoftmaxCrossEntropy(v, labels).loss; }, logits));
}

}  // namespace lid::testing

#endif  // LID_TESTS_GRADCHECK_HPP_
