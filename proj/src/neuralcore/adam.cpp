// src/neuralcore/adam.cpp

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

#include "lid/adam.hpp"

#include <cmath>

namespace lid::nn {

void AdamStep(Parameter& param, const AdamConfig& cfg, std::int64_t step) {
  RequireFinite(param.grad, "adam");
  const auto& g = param.grad.values().array();
  auto m = param.first_moment.values().array();
  auto v = param.second_moment.values().array();
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.square();
  const double t = static_cast<double>(step);
  const double correct1 = 1.0 - std::pow(cfg.beta1, t);
  const double correct2 = 1.0 - std::pow(cfg.beta2, t);
  param.value.values().array() -= cfg.lr * (m / correct1) / ((v / correct2).sqrt() + cfg.eps);
}

void Adam::Step(std::span<Parameter* const> params) {
  for (const Parameter* p : params) RequireFinite(p->grad, "adam");
  ++step_;
  for (Parameter* p : params) AdamStep(*p, cfg_, step_);
}

}  // namespace lid::nn
