// include/lid/adam.hpp

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

#ifndef LID_ADAM_HPP_
#define LID_ADAM_HPP_

#include <cstdint>
#include <span>

#include "lid/layers.hpp"

namespace lid::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update of a single parameter. `step` is the
/// 1-based index of this update. Throws NumericError, leaving the parameter
/// untouched, if the gradient is not finite.
void AdamStep(Parameter& param, const AdamConfig& cfg, std::int64_t step);

/// Owns the step counter shared by a set of parameters.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  /// Checks every gradient first so that a non-finite value aborts the step
  /// before any parameter moves.
  void Step(std::span<Parameter* const> params);

  std::int64_t steps() const { return step_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::int64_t step_ = 0;
};

}  // namespace lid::nn

#endif  // LID_ADAM_HPP_
