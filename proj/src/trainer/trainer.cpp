// src/trainer/trainer.cpp

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

#include "lid/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "lid/adam.hpp"
#include "lid/evaluation.hpp"
#include "lid/layers.hpp"

namespace lid::train {

namespace {

constexpr std::uint64_t kSourceBatchStream = 100;
constexpr std::uint64_t kTargetOrderStream = 200;

using Snapshot = std::vector<std::vector<double>>;

Snapshot TakeSnapshot(model::LidModel& m) {
  Snapshot s;
  for (const auto& e : m.State()) s.emplace_back(e.data, e.data + e.size);
  return s;
}

void Restore(model::LidModel& m, const Snapshot& s) {
  auto state = m.State();
  for (std::size_t i = 0; i < state.size(); ++i) std::copy(s[i].begin(), s[i].end(), state[i].data);
}

void CheckConfig(const TrainConfig& cfg) {
  if (cfg.epochs <= 0) throw ConfigError("train: epochs must be positive");
  if (cfg.batch_size == 0) throw ConfigError("train: batch size must be positive");
  if (!(cfg.lr >= 0.0)) throw ConfigError("train: learning rate must be non-negative");
}

void RequireFiniteLoss(double loss, const char* what, std::int64_t step) {
  if (!std::isfinite(loss)) {
    throw NumericError(std::string(what) + " loss is not finite at step " + std::to_string(step));
  }
}

// Shared end-of-epoch bookkeeping: validation, best snapshot, checkpoint hook.
class EpochTracker {
 public:
  EpochTracker(model::LidModel& m, const corpus::FeatureDataset& valid, const TrainConfig& cfg)
      : model_(m), valid_(valid), cfg_(cfg) {}

  void Finish(int epoch, double lang_sum, double dom_sum, std::size_t steps, TrainLog& log) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_language_loss = lang_sum / static_cast<double>(steps);
    rec.mean_domain_loss = dom_sum / static_cast<double>(steps);
    if (valid_.size() > 0) {
      const auto pred = eval::PredictAll(model_, valid_.features, cfg_.eval_batch_size);
      const auto cm = eval::ConfusionMatrix::FromPairs(valid_.labels, pred, static_cast<int>(model_.architecture().num_languages));
      rec.valid_accuracy = eval::Accuracy(cm);
      rec.valid_balanced_accuracy = eval::BalancedAccuracy(cm);
    }
    log.epochs.push_back(rec);
    spdlog::info("epoch {:3d}  lang_loss {:.4f}  dom_loss {:.4f}  valid_bacc {:.4f}", epoch, rec.mean_language_loss,
                 rec.mean_domain_loss, rec.valid_balanced_accuracy);
    if (!have_best_ || rec.valid_balanced_accuracy >= log.best_valid_balanced_accuracy) {
      have_best_ = true;
      log.best_epoch = epoch;
      log.best_valid_balanced_accuracy = rec.valid_balanced_accuracy;
      if (cfg_.keep_best && valid_.size() > 0) best_ = TakeSnapshot(model_);
    }
    if (cfg_.checkpoint_every > 0 && epoch % cfg_.checkpoint_every == 0 && cfg_.on_checkpoint) {
      cfg_.on_checkpoint(epoch, model_);
    }
  }

  void RestoreBest(TrainLog& log) {
    if (!best_.empty()) {
      Restore(model_, best_);
    } else {
      log.best_epoch = log.epochs.empty() ? 0 : log.epochs.back().epoch;
    }
  }

 private:
  model::LidModel& model_;
  const corpus::FeatureDataset& valid_;
  const TrainConfig& cfg_;
  bool have_best_ = false;
  Snapshot best_;
};

std::vector<int> Gather(std::span<const int> labels, std::span<const std::size_t> idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(labels[i]);
  return out;
}

}  // namespace

TrainLog TrainSupervised(model::LidModel& model, const corpus::FeatureDataset& train,
                         const corpus::FeatureDataset& valid, const TrainConfig& cfg) {
  CheckConfig(cfg);
  if (train.size() == 0) throw DataError("train: empty training set");
  nn::Adam adam({cfg.lr});
  TrainLog log;
  EpochTracker tracker(model, valid, cfg);
  const auto params = model.Parameters();
  std::int64_t step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng rng = Rng::Derive(cfg.seed, kSourceBatchStream + static_cast<std::uint64_t>(epoch));
    const auto batches = corpus::MakeBatches(train.labels, cfg.batch_size, rng, cfg.balanced_batches);
    double lang_sum = 0.0;
    for (const auto& idx : batches) {
      model.ZeroGrad();
      const auto acts = model.Forward(corpus::MakeBatchTensor(train.features, idx), nn::Mode::kTrain, false);
      const auto labels = Gather(train.labels, idx);
      const auto ce = nn::SoftmaxCrossEntropy(acts.language_logits, labels);
      RequireFiniteLoss(ce.loss, "language", step);
      model.Backward(acts, &ce.grad, nullptr, 0.0);
      adam.Step(params);
      log.steps.push_back({step, ce.loss, 0.0, 0.0});
      lang_sum += ce.loss;
      ++step;
    }
    tracker.Finish(epoch, lang_sum, 0.0, batches.size(), log);
  }
  tracker.RestoreBest(log);
  return log;
}

std::int64_t DannSteps(std::size_t n, const TrainConfig& cfg) {
  const std::size_t half = std::max<std::size_t>(1, cfg.batch_size / 2);
  return static_cast<std::int64_t>((n + half - 1) / half) * cfg.epochs;
}

TrainLog TrainDann(model::LidModel& model, const corpus::FeatureDataset& source,
                   const corpus::UnlabeledFeatures& target, const corpus::FeatureDataset& valid,
                   const TrainConfig& cfg) {
  CheckConfig(cfg);
  if (!model.has_domain_branch()) throw ConfigError("train_dann: model variant has no domain branch");
  if (source.size() == 0) throw DataError("train_dann: empty source set");
  if (target.size() == 0) throw DataError("train_dann: empty target set");

  const std::size_t half = std::max<std::size_t>(1, cfg.batch_size / 2);
  const std::int64_t total_steps = DannSteps(source.size(), cfg);
  const model::LambdaSchedule schedule{cfg.lambda_gamma, std::max<std::int64_t>(1, total_steps - 1)};

  nn::Adam adam({cfg.lr});
  TrainLog log;
  EpochTracker tracker(model, valid, cfg);
  const auto params = model.Parameters();
  std::int64_t step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng batch_rng = Rng::Derive(cfg.seed, kSourceBatchStream + static_cast<std::uint64_t>(epoch));
    const auto batches = corpus::MakeBatches(source.labels, half, batch_rng, cfg.balanced_batches);
    Rng target_rng = Rng::Derive(cfg.seed, kTargetOrderStream + static_cast<std::uint64_t>(epoch));
    std::vector<std::size_t> target_order(target.size());
    for (std::size_t i = 0; i < target_order.size(); ++i) target_order[i] = i;
    target_rng.Shuffle(std::span<std::size_t>(target_order));
    std::size_t target_pos = 0;

    double lang_sum = 0.0;
    double dom_sum = 0.0;
    for (const auto& src_idx : batches) {
      std::vector<std::size_t> tgt_idx(src_idx.size());
      for (auto& t : tgt_idx) {
        t = target_order[target_pos];
        target_pos = (target_pos + 1) % target_order.size();
      }
      const double lambda = cfg.fixed_lambda ? *cfg.fixed_lambda
                                             : model::LambdaAt(schedule, std::min(step, schedule.total_steps));

      // One pass over source then target items; the batch-norm statistics
      // (and their running estimates) come from the source items alone, so
      // target items are normalized the way inference will normalize them.
      const Tensor src = corpus::MakeBatchTensor(source.features, src_idx);
      const Tensor tgt = corpus::MakeBatchTensor(target.features, tgt_idx);
      if (src.dim(2) != tgt.dim(2)) {
        throw DimensionError("train_dann: source segments have " + std::to_string(src.dim(2)) +
                             " frames, target segments " + std::to_string(tgt.dim(2)));
      }
      const Index ns = src.dim(0);
      const Index nt = tgt.dim(0);
      Tensor joint({ns + nt, src.dim(1), src.dim(2)});
      joint.values().head(src.size()) = src.values();
      joint.values().tail(tgt.size()) = tgt.values();

      model.ZeroGrad();
      const auto acts = model.Forward(joint, nn::Mode::kTrain, true, true, ns);

      const auto labels = Gather(source.labels, src_idx);
      Tensor src_logits({ns, acts.language_logits.dim(1)});
      src_logits.Matrix() = acts.language_logits.Matrix().topRows(ns);
      const auto lang = nn::SoftmaxCrossEntropy(src_logits, labels);
      RequireFiniteLoss(lang.loss, "language", step);
      Tensor lang_grad(acts.language_logits.shape());
      lang_grad.Matrix().topRows(ns) = lang.grad.Matrix();

      std::vector<int> dom_labels(static_cast<std::size_t>(ns), 0);
      dom_labels.resize(static_cast<std::size_t>(ns + nt), 1);
      const auto dom = nn::SoftmaxCrossEntropy(*acts.domain_logits, dom_labels);
      RequireFiniteLoss(dom.loss, "domain", step);

      model.Backward(acts, &lang_grad, &dom.grad, lambda);
      adam.Step(params);

      log.steps.push_back({step, lang.loss, dom.loss, lambda});
      lang_sum += lang.loss;
      dom_sum += dom.loss;
      ++step;
    }
    tracker.Finish(epoch, lang_sum, dom_sum, batches.size(), log);
  }
  tracker.RestoreBest(log);
  return log;
}

namespace {

std::string Shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string StepsToCsv(const TrainLog& log) {
  std::string out = "step,lang_loss,dom_loss,lambda\n";
  for (const auto& s : log.steps) {
    out += std::to_string(s.step) + ',' + Shortest(s.language_loss) + ',' + Shortest(s.domain_loss) + ',' +
           Shortest(s.lambda) + '\n';
  }
  return out;
}

std::string EpochsToJson(const TrainLog& log) {
  nlohmann::ordered_json root;
  nlohmann::ordered_json epochs = nlohmann::ordered_json::array();
  for (const auto& e : log.epochs) {
    nlohmann::ordered_json j;
    j["epoch"] = e.epoch;
    j["mean_lang_loss"] = e.mean_language_loss;
    j["mean_dom_loss"] = e.mean_domain_loss;
    j["valid_accuracy"] = e.valid_accuracy;
    j["valid_balanced_accuracy"] = e.valid_balanced_accuracy;
    epochs.push_back(std::move(j));
  }
  root["epochs"] = epochs;
  root["best_epoch"] = log.best_epoch;
  root["best_valid_balanced_accuracy"] = log.best_valid_balanced_accuracy;
  return root.dump(2) + "\n";
}

}  // namespace lid::train
