// tools/lid.cpp

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

// lid: language identification pipeline.
//
//   lid synth      --config run.ini [--seed N] [--jobs N]
//   lid featurize  --config run.ini [--seed N] [--jobs N]
//   lid train      --config run.ini [--seed N]
//   lid evaluate   --config run.ini [--seed N]
//   lid project    --config run.ini [--seed N]
//
// Exit status: 0 success, 1 usage or config error, 2 data error,
// 3 numeric failure. LID_LOG_LEVEL selects error|warn|info|debug.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "lid/commands.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

bool SetupLogging() {
  auto logger = spdlog::stderr_color_mt("lid");
  logger->set_pattern("%^%l%$: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  const char* env = std::getenv("LID_LOG_LEVEL");
  if (!env || !*env) return true;
  const std::string level(env);
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "warn") {
    spdlog::set_level(spdlog::level::warn);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    std::cerr << "lid: LID_LOG_LEVEL must be one of error, warn, info, debug (got '" << level << "')\n";
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (!SetupLogging()) return kUsage;

  CLI::App app{"Spoken language identification with domain-adversarial training"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  auto add = [&](const char* name, const char* help, bool with_jobs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Config file (INI)")->required();
    sub->add_option("--seed", seed, "Override the config seed");
    if (with_jobs) sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    return sub;
  };
  auto* synth = add("synth", "Generate the synthetic two-domain corpus", true);
  auto* featurize = add("featurize", "Extract MFSC/MFCC features from an audio manifest", true);
  auto* train = add("train", "Train the configured model variant", false);
  auto* evaluate = add("evaluate", "Cross-domain evaluation of trained checkpoints", false);
  auto* project = add("project", "t-SNE projection of hidden representations", false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    auto config = lid::cli::LoadConfig(config_path);
    if (seed) config.SetSeed(*seed);
    if (synth->parsed()) {
      lid::cli::RunSynth(config, jobs);
    } else if (featurize->parsed()) {
      lid::cli::RunFeaturize(config, jobs);
    } else if (train->parsed()) {
      lid::cli::RunTrain(config);
    } else if (evaluate->parsed()) {
      lid::cli::RunEvaluate(config, std::cout);
    } else if (project->parsed()) {
      lid::cli::RunProject(config);
    }
  } catch (const lid::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const lid::NumericError& e) {
    spdlog::error("{}", e.what());
    return kNumeric;
  } catch (const lid::Error& e) {
    spdlog::error("{}", e.what());
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kData;
  }
  return kOk;
}
