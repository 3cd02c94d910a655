// include/lid/config.hpp

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

#ifndef LID_CONFIG_HPP_
#define LID_CONFIG_HPP_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "lid/features.hpp"
#include "lid/model.hpp"
#include "lid/synth.hpp"
#include "lid/trainer.hpp"
#include "lid/tsne.hpp"

namespace lid::cli {

struct DataSettings {
  std::uint64_t seed = 0;
  std::string name = "default";
  std::filesystem::path run_root = "runs";
  /// Audio manifest to featurize; empty means the run's synthetic corpus.
  std::filesystem::path manifest;
};

struct TrainSettings {
  frontend::FeatureKind kind = frontend::FeatureKind::kMfcc;
  model::Variant variant = model::Variant::kNone;
  std::string source = "clean";
  std::string target = "noisy";
  train::TrainConfig train;
};

struct EvalSettings {
  std::vector<frontend::FeatureKind> kinds = {frontend::FeatureKind::kMfsc, frontend::FeatureKind::kMfcc};
  std::vector<model::Variant> variants = {model::Variant::kNone};
  std::vector<std::string> sources = {"clean"};
  std::vector<std::string> domains = {"clean", "noisy"};
  corpus::Split split = corpus::Split::kEval;
  std::size_t batch_size = 64;
};

struct VizSettings {
  frontend::FeatureKind kind = frontend::FeatureKind::kMfcc;
  model::Variant variant = model::Variant::kDA2;
  std::string source = "clean";
  std::vector<std::string> domains = {"clean", "noisy"};
  corpus::Split split = corpus::Split::kEval;
  viz::ProjectionConfig projection;
};

/// The full effective configuration of a run. Defaults follow the
/// published training setup where one exists.
struct Config {
  DataSettings data;
  corpus::SynthSpec synth;
  std::vector<frontend::FeatureKind> feature_kinds = {frontend::FeatureKind::kMfsc, frontend::FeatureKind::kMfcc};
  model::Architecture architecture;
  TrainSettings train;
  EvalSettings eval;
  VizSettings viz;

  std::filesystem::path RunDir() const { return data.run_root / data.name; }
  std::filesystem::path CorpusManifest() const;
  std::filesystem::path FeatureManifest(frontend::FeatureKind kind) const;
  std::filesystem::path CheckpointPath(frontend::FeatureKind kind, model::Variant variant,
                                       const std::string& source) const;

  /// Propagates the master seed into the module configs.
  void SetSeed(std::uint64_t seed);
};

/// Parses an INI document. Every section and key must be known; values are
/// validated before returning. Throws ConfigError.
Config ParseConfig(const std::string& text);

/// Reads and parses a config file; a missing file is a ConfigError naming it.
Config LoadConfig(const std::filesystem::path& path);

/// Canonical INI text of every key; ParseConfig(ToIni(c)) reproduces c.
std::string ToIni(const Config& config);

}  // namespace lid::cli

#endif  // LID_CONFIG_HPP_
