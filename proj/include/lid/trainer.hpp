// include/lid/trainer.hpp

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

#ifndef LID_TRAINER_HPP_
#define LID_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lid/corpus.hpp"
#include "lid/model.hpp"

namespace lid::train {

struct TrainConfig {
  int epochs = 50;
  std::size_t batch_size = 256;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  model::Variant variant = model::Variant::kNone;
  double lambda_gamma = 10.0;
  /// Overrides the schedule with a constant adaptation factor.
  std::optional<double> fixed_lambda;
  bool balanced_batches = true;
  /// Restore the epoch with the best source-validation balanced accuracy.
  bool keep_best = true;
  /// Call `on_checkpoint` every this many epochs (0 = never).
  int checkpoint_every = 0;
  std::function<void(int epoch, model::LidModel&)> on_checkpoint;
  std::size_t eval_batch_size = 64;
};

struct StepRecord {
  std::int64_t step = 0;
  double language_loss = 0.0;
  double domain_loss = 0.0;
  double lambda = 0.0;
};

struct EpochRecord {
  int epoch = 0;
  double mean_language_loss = 0.0;
  double mean_domain_loss = 0.0;
  double valid_accuracy = 0.0;
  double valid_balanced_accuracy = 0.0;
};

struct TrainLog {
  std::vector<StepRecord> steps;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_valid_balanced_accuracy = 0.0;
};

/// Minimizes the mean language cross-entropy with Adam over seeded
/// minibatches. Throws NumericError on a non-finite loss.
TrainLog TrainSupervised(model::LidModel& model, const corpus::FeatureDataset& train,
                         const corpus::FeatureDataset& valid, const TrainConfig& cfg);

/// Domain-adversarial training. Every step takes batch_size/2 labeled source
/// items (language loss, domain 0) and as many unlabeled target items
/// (domain 1). One epoch is one pass over the source set; target items are
/// drawn from a per-epoch shuffle, wrapping around as needed. Both halves go
/// through one forward and one backward pass; batch normalization uses the
/// source half's statistics for every item and only those reach the running
/// estimates.
TrainLog TrainDann(model::LidModel& model, const corpus::FeatureDataset& source,
                   const corpus::UnlabeledFeatures& target, const corpus::FeatureDataset& valid,
                   const TrainConfig& cfg);

/// Total optimizer steps TrainDann will take for a source set of size n.
std::int64_t DannSteps(std::size_t n, const TrainConfig& cfg);

/// "step,lang_loss,dom_loss,lambda" rows with round-trip precision.
std::string StepsToCsv(const TrainLog& log);

/// Per-epoch validation metrics and the selected epoch.
std::string EpochsToJson(const TrainLog& log);

}  // namespace lid::train

#endif  // LID_TRAINER_HPP_
