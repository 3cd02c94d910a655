// include/lid/model.hpp

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

#ifndef LID_MODEL_HPP_
#define LID_MODEL_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lid/layers.hpp"

namespace lid::model {

/// Where (if anywhere) the adversarial domain branch attaches.
///  kNone: plain language classifier.
///  kDA1:  domain branch reads the pooled conv-block output f.
///  kDA2:  domain branch reads the first fully-connected layer's output, so
///         reversed gradients also reach that layer.
enum class Variant : std::uint8_t { kNone = 0, kDA1 = 1, kDA2 = 2 };

std::string_view VariantName(Variant v);
Variant ParseVariant(std::string_view name);

struct Architecture {
  Index input_dim = 13;
  std::array<Index, 3> filters{128, 256, 512};
  std::array<Index, 3> widths{5, 10, 10};
  Index hidden = 512;
  Index num_languages = 6;
  Index domain_hidden = 1024;
  Index num_domains = 2;

  /// Shortest input for which all three valid convolutions fit.
  Index MinInputLength() const { return widths[0] + widths[1] + widths[2] - 2; }
  Index RepresentationDim() const { return filters[2]; }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// lambda(p) = 2 / (1 + exp(-gamma p)) - 1 with p = step / total_steps.
struct LambdaSchedule {
  double gamma = 10.0;
  std::int64_t total_steps = 1;
};

double LambdaAt(const LambdaSchedule& schedule, std::int64_t step);

/// Everything one forward pass keeps for its backward pass.
struct Activations {
  Tensor input;
  std::array<Tensor, 3> conv_out;
  std::array<nn::BatchNormCache, 3> bn;
  std::array<Tensor, 3> block_out;
  nn::MaxPoolResult pooled;
  Tensor hidden;
  Tensor language_logits;

  std::optional<Tensor> domain_logits;
  Tensor domain_hidden1;
  Tensor domain_hidden2;

  /// f: pooled conv-block output, [B, filters[2]].
  const Tensor& representation() const { return pooled.output; }
  /// Input to the final language layer, [B, hidden].
  const Tensor& last_hidden() const { return hidden; }
};

/// Named view of one state tensor, for serialization.
struct StateEntry {
  std::string name;
  Tensor::Shape shape;
  double* data;
  Index size;
};

class LidModel {
 public:
  LidModel(const Architecture& arch, Variant variant, Rng& rng);

  Variant variant() const { return variant_; }
  const Architecture& architecture() const { return arch_; }
  bool has_domain_branch() const { return variant_ != Variant::kNone; }

  /// batch [B, input_dim, T]. Train mode uses batch statistics and, when
  /// `update_running` is set, updates the batch-norm running estimates.
  /// Batch statistics come from the first `stat_items` items (0 = all) and
  /// normalize the whole batch.
  /// The domain branch runs when the model has one and `with_domain` is set.
  Activations Forward(const Tensor& batch, nn::Mode mode, bool with_domain = true,
                      bool update_running = true, Index stat_items = 0);

  /// Inference-mode forward pass without side effects.
  Activations Infer(const Tensor& batch, bool with_domain = false) const;

  /// Accumulates parameter gradients. Either gradient may be null.
  /// The domain gradient passes the reversal layer (scaled by -lambda)
  /// before entering the shared layers; the domain classifier itself
  /// receives the unreversed gradient.
  void Backward(const Activations& acts, const Tensor* language_grad, const Tensor* domain_grad,
                double lambda);

  std::vector<int> Predict(const Tensor& batch) const;

  void ZeroGrad();

  /// Trainable parameters in topological order.
  std::vector<nn::Parameter*> Parameters();
  std::vector<nn::Parameter*> SharedParameters();
  std::vector<nn::Parameter*> DomainParameters();

  /// Parameters and batch-norm running statistics, in checkpoint order.
  std::vector<StateEntry> State();

  Index LanguagePathParameterCount() const;
  Index DomainClassifierParameterCount() const;

  const nn::Conv1dState& conv(int i) const { return conv_[static_cast<std::size_t>(i)]; }
  nn::Conv1dState& conv(int i) { return conv_[static_cast<std::size_t>(i)]; }
  const nn::BatchNormState& batch_norm(int i) const { return bn_[static_cast<std::size_t>(i)]; }
  nn::BatchNormState& batch_norm(int i) { return bn_[static_cast<std::size_t>(i)]; }
  const nn::LinearState& fc1() const { return fc1_; }
  nn::LinearState& fc1() { return fc1_; }
  const nn::LinearState& fc2() const { return fc2_; }
  nn::LinearState& fc2() { return fc2_; }
  nn::LinearState& domain_layer(int i) { return domain_[static_cast<std::size_t>(i)]; }

 private:
  // Train mode when `train_bn` is non-null (it must point at bn_).
  Activations Run(const Tensor& batch, bool with_domain, std::array<nn::BatchNormState, 3>* train_bn,
                  bool update_running, Index stat_items) const;

  Architecture arch_;
  Variant variant_;
  std::array<nn::Conv1dState, 3> conv_;
  std::array<nn::BatchNormState, 3> bn_;
  nn::LinearState fc1_;
  nn::LinearState fc2_;
  std::array<nn::LinearState, 3> domain_;
};

/// Row-wise argmax; the lowest index wins ties.
std::vector<int> ArgmaxRows(const Tensor& logits);

// ---------------------------------------------------------------------------
// Checkpoints: "LIDM", u16 version, u8 variant, then per tensor
// (u32 name length, name bytes, u32 rank, u32 dims..., f64 values) until EOF.
// All integers and floats little-endian.

inline constexpr std::uint16_t kCheckpointVersion = 1;

void SaveCheckpoint(LidModel& model, const std::string& path);

/// Rebuilds the architecture from the stored tensor shapes.
LidModel LoadCheckpoint(const std::string& path);

// ---------------------------------------------------------------------------
// Representation dumps: "LIDR", u32 N, u32 dim, N*dim f32 values, row-major.

void WriteRepresentations(const Tensor& rows, const std::string& path);
Tensor ReadRepresentations(const std::string& path);

}  // namespace lid::model

#endif  // LID_MODEL_HPP_
