// tests/support/model_checks.hpp

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

#ifndef LID_TESTS_MODEL_CHECKS_HPP_
#define LID_TESTS_MODEL_CHECKS_HPP_

#include <vector>

#include "lid/layers.hpp"
#include "lid/model.hpp"
#include "oracles.hpp"

namespace lid::testing {

inline model::Architecture TinyArchitecture() {
  model::Architecture a;
  a.filters = {4, 5, 6};
  a.widths = {3, 4, 2};
  a.hidden = 7;
  a.num_languages = 3;
  a.domain_hidden = 8;
  return a;
}

inline std::vector<Eigen::VectorXd> GradSnapshot(model::LidModel& m) {
  std::vector<Eigen::VectorXd> out;
  for (auto* p : m.Parameters()) out.push_back(p->grad.values());
  return out;
}

/// Shared-parameter gradient of the combined objective against the two
/// separately computed terms: returns max |g_total - (g_y - lambda * g_d)|
/// over the shared parameters, and over the domain classifier
/// max |g_total - g_d|.
struct AssemblyResult {
  double shared = 0.0;
  double domain = 0.0;
};

inline AssemblyResult CheckGradientAssembly(model::Variant variant, double lambda, std::uint64_t seed) {
  Rng rng(seed);
  model::LidModel m(TinyArchitecture(), variant, rng);
  const Tensor x = RandomTensor({4, 13, 20}, seed + 1);
  const std::vector<int> y = {0, 2, 1, 2};
  const std::vector<int> d = {0, 1, 0, 1};
  const auto acts = m.Forward(x, nn::Mode::kTrain, true, false);
  const auto ly = nn::SoftmaxCrossEntropy(acts.language_logits, y);
  const auto ld = nn::SoftmaxCrossEntropy(*acts.domain_logits, d);

  m.ZeroGrad();
  m.Backward(acts, &ly.grad, nullptr, 0.0);
  const auto g_y = GradSnapshot(m);
  // A reversal factor of -1 hands the shared layers the plain domain-loss
  // gradient.
  m.ZeroGrad();
  m.Backward(acts, nullptr, &ld.grad, -1.0);
  const auto g_d = GradSnapshot(m);
  m.ZeroGrad();
  m.Backward(acts, &ly.grad, &ld.grad, lambda);
  const auto g = GradSnapshot(m);

  const auto shared = m.SharedParameters().size();
  AssemblyResult r;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i < shared) {
      r.shared = std::max(r.shared, (g[i] - (g_y[i] - lambda * g_d[i])).cwiseAbs().maxCoeff());
    } else {
      r.domain = std::max(r.domain, (g[i] - g_d[i]).cwiseAbs().maxCoeff());
    }
  }
  return r;
}

}  // namespace lid::testing

#endif  // LID_TESTS_MODEL_CHECKS_HPP_
