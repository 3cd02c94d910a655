// src/model/model.cpp

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

#include "lid/model.hpp"

#include <algorithm>
#include <cmath>

namespace lid::model {

std::string_view VariantName(Variant v) {
  switch (v) {
    case Variant::kNone:
      return "none";
    case Variant::kDA1:
      return "da1";
    case Variant::kDA2:
      return "da2";
  }
  return "?";
}

Variant ParseVariant(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "none") return Variant::kNone;
  if (lower == "da1") return Variant::kDA1;
  if (lower == "da2") return Variant::kDA2;
  throw ConfigError("unknown model variant '" + std::string(name) + "' (expected none, da1, da2)");
}

double LambdaAt(const LambdaSchedule& schedule, std::int64_t step) {
  if (schedule.total_steps <= 0) throw ConfigError("lambda schedule: total_steps must be positive");
  if (step < 0 || step > schedule.total_steps) {
    throw ConfigError("lambda schedule: step " + std::to_string(step) + " outside [0, " +
                      std::to_string(schedule.total_steps) + "]");
  }
  const double p = static_cast<double>(step) / static_cast<double>(schedule.total_steps);
  return 2.0 / (1.0 + std::exp(-schedule.gamma * p)) - 1.0;
}

LidModel::LidModel(const Architecture& arch, Variant variant, Rng& rng)
    : arch_(arch), variant_(variant) {
  Index in = arch.input_dim;
  for (std::size_t i = 0; i < 3; ++i) {
    conv_[i] = nn::Conv1dState(in, arch.filters[i], arch.widths[i]);
    nn::InitParameters(conv_[i], rng);
    bn_[i] = nn::BatchNormState(arch.filters[i]);
    in = arch.filters[i];
  }
  fc1_ = nn::LinearState(arch.filters[2], arch.hidden);
  fc2_ = nn::LinearState(arch.hidden, arch.num_languages);
  nn::InitParameters(fc1_, rng);
  nn::InitParameters(fc2_, rng);
  if (has_domain_branch()) {
    const Index domain_in = variant == Variant::kDA1 ? arch.filters[2] : arch.hidden;
    domain_[0] = nn::LinearState(domain_in, arch.domain_hidden);
    domain_[1] = nn::LinearState(arch.domain_hidden, arch.domain_hidden);
    domain_[2] = nn::LinearState(arch.domain_hidden, arch.num_domains);
    for (auto& layer : domain_) nn::InitParameters(layer, rng);
  }
}

Activations LidModel::Run(const Tensor& batch, bool with_domain,
                          std::array<nn::BatchNormState, 3>* train_bn, bool update_running,
                          Index stat_items) const {
  RequireRank(batch, 3, "model forward");
  if (batch.dim(1) != arch_.input_dim) {
    throw DimensionError("model forward: expected " + std::to_string(arch_.input_dim) +
                         " feature dims, got " + std::to_string(batch.dim(1)));
  }
  if (batch.dim(2) < arch_.MinInputLength()) {
    throw InputTooShortError("model forward: " + std::to_string(batch.dim(2)) +
                             " frames, need at least " + std::to_string(arch_.MinInputLength()));
  }
  Activations a;
  a.input = batch;
  const Tensor* x = &a.input;
  for (std::size_t i = 0; i < 3; ++i) {
    a.conv_out[i] = nn::Conv1dForward(*x, conv_[i]);
    Tensor normed;
    if (train_bn != nullptr) {
      normed = nn::BatchNormForward(a.conv_out[i], (*train_bn)[i], nn::Mode::kTrain, &a.bn[i],
                                    update_running, stat_items);
    } else {
      normed = nn::BatchNormInfer(a.conv_out[i], bn_[i]);
    }
    a.block_out[i] = nn::Relu(normed);
    x = &a.block_out[i];
  }
  a.pooled = nn::GlobalMaxPool(a.block_out[2]);
  a.hidden = nn::Relu(nn::LinearForward(a.pooled.output, fc1_));
  a.language_logits = nn::LinearForward(a.hidden, fc2_);

  if (with_domain && has_domain_branch()) {
    const Tensor& branch = variant_ == Variant::kDA1 ? a.pooled.output : a.hidden;
    a.domain_hidden1 = nn::Relu(nn::LinearForward(nn::GradientReversalForward(branch), domain_[0]));
    a.domain_hidden2 = nn::Relu(nn::LinearForward(a.domain_hidden1, domain_[1]));
    a.domain_logits = nn::LinearForward(a.domain_hidden2, domain_[2]);
  }
  return a;
}

Activations LidModel::Forward(const Tensor& batch, nn::Mode mode, bool with_domain,
                              bool update_running, Index stat_items) {
  if (mode == nn::Mode::kTrain) return Run(batch, with_domain, &bn_, update_running, stat_items);
  return Run(batch, with_domain, nullptr, false, 0);
}

Activations LidModel::Infer(const Tensor& batch, bool with_domain) const {
  return Run(batch, with_domain, nullptr, false, 0);
}

void LidModel::Backward(const Activations& a, const Tensor* language_grad, const Tensor* domain_grad,
                        double lambda) {
  Tensor d_hidden;
  Tensor d_repr;
  if (language_grad != nullptr) {
    d_hidden = nn::LinearBackward(a.hidden, *language_grad, fc2_);
  }
  if (domain_grad != nullptr) {
    if (!has_domain_branch() || !a.domain_logits) {
      throw DimensionError("model backward: domain gradient without a domain branch pass");
    }
    const Tensor& branch = variant_ == Variant::kDA1 ? a.pooled.output : a.hidden;
    Tensor g = nn::LinearBackward(a.domain_hidden2, *domain_grad, domain_[2]);
    g = nn::LinearBackward(a.domain_hidden1, nn::ReluBackward(a.domain_hidden2, g), domain_[1]);
    g = nn::LinearBackward(branch, nn::ReluBackward(a.domain_hidden1, g), domain_[0]);
    g = nn::GradientReversalBackward(g, lambda);
    Tensor& target = variant_ == Variant::kDA1 ? d_repr : d_hidden;
    if (target.empty()) {
      target = std::move(g);
    } else {
      target.values() += g.values();
    }
  }
  if (!d_hidden.empty()) {
    Tensor d = nn::LinearBackward(a.pooled.output, nn::ReluBackward(a.hidden, d_hidden), fc1_);
    if (d_repr.empty()) {
      d_repr = std::move(d);
    } else {
      d_repr.values() += d.values();
    }
  }
  if (d_repr.empty()) return;

  Tensor g = nn::GlobalMaxPoolBackward(d_repr, a.pooled);
  for (int i = 2; i >= 0; --i) {
    const auto k = static_cast<std::size_t>(i);
    g = nn::ReluBackward(a.block_out[k], g);
    g = nn::BatchNormBackward(g, a.bn[k], bn_[k]);
    const Tensor& input = i == 0 ? a.input : a.block_out[k - 1];
    g = nn::Conv1dBackward(input, g, conv_[k], /*need_input_grad=*/i > 0);
  }
}

std::vector<int> ArgmaxRows(const Tensor& logits) {
  RequireRank(logits, 2, "argmax");
  std::vector<int> out(static_cast<std::size_t>(logits.dim(0)));
  for (Index i = 0; i < logits.dim(0); ++i) {
    int best = 0;
    for (Index k = 1; k < logits.dim(1); ++k) {
      if (logits(i, k) > logits(i, best)) best = static_cast<int>(k);
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

std::vector<int> LidModel::Predict(const Tensor& batch) const {
  return ArgmaxRows(Infer(batch).language_logits);
}

void LidModel::ZeroGrad() {
  for (nn::Parameter* p : Parameters()) p->ZeroGrad();
}

std::vector<nn::Parameter*> LidModel::SharedParameters() {
  std::vector<nn::Parameter*> out;
  for (std::size_t i = 0; i < 3; ++i) {
    out.insert(out.end(), {&conv_[i].weight, &conv_[i].bias, &bn_[i].gamma, &bn_[i].beta});
  }
  out.insert(out.end(), {&fc1_.weight, &fc1_.bias, &fc2_.weight, &fc2_.bias});
  return out;
}

std::vector<nn::Parameter*> LidModel::DomainParameters() {
  std::vector<nn::Parameter*> out;
  if (!has_domain_branch()) return out;
  for (auto& layer : domain_) out.insert(out.end(), {&layer.weight, &layer.bias});
  return out;
}

std::vector<nn::Parameter*> LidModel::Parameters() {
  auto out = SharedParameters();
  auto dom = DomainParameters();
  out.insert(out.end(), dom.begin(), dom.end());
  return out;
}

std::vector<StateEntry> LidModel::State() {
  std::vector<StateEntry> out;
  auto add = [&out](std::string name, nn::Parameter& p) {
    out.push_back({std::move(name), p.value.shape(), p.value.data(), p.value.size()});
  };
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string n = std::to_string(i + 1);
    add("conv" + n + ".weight", conv_[i].weight);
    add("conv" + n + ".bias", conv_[i].bias);
    add("bn" + n + ".gamma", bn_[i].gamma);
    add("bn" + n + ".beta", bn_[i].beta);
    auto& rm = bn_[i].running_mean;
    auto& rv = bn_[i].running_var;
    out.push_back({"bn" + n + ".running_mean", {rm.size()}, rm.data(), rm.size()});
    out.push_back({"bn" + n + ".running_var", {rv.size()}, rv.data(), rv.size()});
  }
  add("fc1.weight", fc1_.weight);
  add("fc1.bias", fc1_.bias);
  add("fc2.weight", fc2_.weight);
  add("fc2.bias", fc2_.bias);
  if (has_domain_branch()) {
    for (std::size_t i = 0; i < 3; ++i) {
      const std::string n = std::to_string(i + 1);
      add("domain" + n + ".weight", domain_[i].weight);
      add("domain" + n + ".bias", domain_[i].bias);
    }
  }
  return out;
}

Index LidModel::LanguagePathParameterCount() const {
  Index n = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    n += conv_[i].weight.size() + conv_[i].bias.size() + bn_[i].gamma.size() + bn_[i].beta.size();
  }
  return n + fc1_.weight.size() + fc1_.bias.size() + fc2_.weight.size() + fc2_.bias.size();
}

Index LidModel::DomainClassifierParameterCount() const {
  if (!has_domain_branch()) return 0;
  Index n = 0;
  for (const auto& layer : domain_) n += layer.weight.size() + layer.bias.size();
  return n;
}

}  // namespace lid::model
