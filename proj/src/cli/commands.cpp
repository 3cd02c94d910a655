// src/cli/commands.cpp

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

#include "lid/commands.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "lid/audio.hpp"
#include "lid/evaluation.hpp"
#include "lid/scatter.hpp"

namespace lid::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kProjectionSampleStream = 300;

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

void PrepareRunDir(const Config& config) {
  const auto run = config.RunDir();
  try {
    for (const char* sub : {"checkpoints", "logs", "reports", "figures"}) fs::create_directories(run / sub);
  } catch (const fs::filesystem_error& e) {
    throw DataError("cannot create run directory '" + run.string() + "': " + e.what());
  }
  WriteText(run / "config.ini", ToIni(config));
}

corpus::Manifest ReadFeatureManifest(const Config& config, frontend::FeatureKind kind) {
  const auto path = config.FeatureManifest(kind);
  if (!fs::exists(path)) {
    throw DataError("feature manifest '" + path.string() + "' not found; run featurize first");
  }
  return corpus::ReadManifest(path);
}

// Class order is the sorted set of languages present in the source domain.
corpus::LabelSet SourceLabels(const corpus::Manifest& manifest, const std::string& source) {
  std::set<std::string> names;
  for (const auto& r : manifest.records) {
    if (r.domain == source && !r.language.empty()) names.insert(r.language);
  }
  if (names.empty()) throw DataError("no labeled records for domain '" + source + "'");
  return corpus::LabelSet(std::vector<std::string>(names.begin(), names.end()));
}

std::string Stem(frontend::FeatureKind kind, model::Variant variant, const std::string& src) {
  return std::string(frontend::FeatureKindName(kind)) + "-" + std::string(model::VariantName(variant)) + "-" + src;
}

model::LidModel LoadRequiredCheckpoint(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("checkpoint '" + path.string() + "' not found; run train first");
  return model::LoadCheckpoint(path.string());
}

}  // namespace

void RunSynth(const Config& config, int jobs) {
  PrepareRunDir(config);
  const auto dir = config.RunDir() / "corpus";
  spdlog::info("synthesizing corpus into {}", dir.string());
  const auto manifest = corpus::Generate(config.synth, dir, jobs);
  spdlog::info("wrote {} utterances", manifest.records.size());
}

void RunFeaturize(const Config& config, int jobs) {
  PrepareRunDir(config);
  const auto source_path = config.CorpusManifest();
  if (!fs::exists(source_path)) throw DataError("audio manifest '" + source_path.string() + "' not found");
  const auto audio = corpus::ReadManifest(source_path);

  for (const auto kind : config.feature_kinds) {
    const auto out_dir = config.FeatureManifest(kind).parent_path();
    spdlog::info("extracting {} features for {} files into {}", frontend::FeatureKindName(kind),
                 audio.records.size(), out_dir.string());
    std::vector<std::vector<corpus::ManifestRecord>> produced(audio.records.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= audio.records.size()) return;
        try {
          const auto& r = audio.records[k];
          const auto wav = frontend::ReadWav(audio.Resolve(r).string());
          const auto seg = frontend::Segment(wav.samples, wav.sample_rate);
          if (seg.status == frontend::SegmentStatus::kTooShort) {
            spdlog::warn("{}: shorter than one segment, skipped", r.path);
            continue;
          }
          fs::path rel = fs::path(r.path);
          rel.replace_extension();
          for (std::size_t s = 0; s < seg.segments.size(); ++s) {
            char suffix[32];
            std::snprintf(suffix, sizeof(suffix), "-s%03zu.lidf", s);
            corpus::ManifestRecord out = r;
            out.path = rel.generic_string() + suffix;
            const auto path = out_dir / out.path;
            fs::create_directories(path.parent_path());
            frontend::WriteFeatures(frontend::Featurize(seg.segments[s], kind), path.string());
            produced[k].push_back(std::move(out));
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = audio.records.size();
        }
      }
    };
    const int threads = std::max(1, jobs);
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    corpus::Manifest m;
    m.base_dir = out_dir;
    for (auto& rs : produced) {
      for (auto& r : rs) m.records.push_back(std::move(r));
    }
    corpus::WriteManifest(m, config.FeatureManifest(kind));
    spdlog::info("wrote {} feature files", m.records.size());
  }
}

void RunTrain(const Config& config) {
  PrepareRunDir(config);
  const auto& ts = config.train;
  const auto manifest = ReadFeatureManifest(config, ts.kind);
  const auto labels = SourceLabels(manifest, ts.source);

  const auto train = corpus::LoadFeatureDataset(manifest, corpus::Split::kTrain, ts.source, labels);
  const auto valid = corpus::LoadFeatureDataset(manifest, corpus::Split::kValid, ts.source, labels);
  if (train.size() == 0) throw DataError("no training records for domain '" + ts.source + "'");

  model::Architecture arch = config.architecture;
  arch.num_languages = labels.size();
  Rng init = Rng::Derive(ts.train.seed, kInitStream);
  model::LidModel net(arch, ts.variant, init);

  const auto stem = Stem(ts.kind, ts.variant, ts.source);
  train::TrainConfig cfg = ts.train;
  cfg.variant = ts.variant;
  const auto run = config.RunDir();
  if (cfg.checkpoint_every > 0) {
    cfg.on_checkpoint = [&](int epoch, model::LidModel& m) {
      model::SaveCheckpoint(m, (run / "checkpoints" / (stem + "-epoch" + std::to_string(epoch) + ".lidm")).string());
    };
  }

  spdlog::info("training {} on {} {} segments ({} languages)", stem, train.size(), ts.source, labels.size());
  train::TrainLog log;
  if (ts.variant == model::Variant::kNone) {
    log = train::TrainSupervised(net, train, valid, cfg);
  } else {
    const auto target = corpus::LoadUnlabeledFeatures(manifest, corpus::Split::kTrain, ts.target);
    if (target.size() == 0) throw DataError("no target training records for domain '" + ts.target + "'");
    log = train::TrainDann(net, train, target, valid, cfg);
  }

  model::SaveCheckpoint(net, config.CheckpointPath(ts.kind, ts.variant, ts.source).string());
  WriteText(run / "logs" / (stem + "-steps.csv"), train::StepsToCsv(log));
  WriteText(run / "logs" / (stem + "-epochs.json"), train::EpochsToJson(log));
  spdlog::info("best epoch {} (valid balanced accuracy {:.4f})", log.best_epoch, log.best_valid_balanced_accuracy);
}

void RunEvaluate(const Config& config, std::ostream& out) {
  PrepareRunDir(config);
  const auto& es = config.eval;

  // Fail on a missing checkpoint before loading any features.
  for (const auto kind : es.kinds) {
    for (const auto variant : es.variants) {
      for (const auto& src : es.sources) {
        const auto path = config.CheckpointPath(kind, variant, src);
        if (!fs::exists(path)) throw DataError("checkpoint '" + path.string() + "' not found; run train first");
      }
    }
  }

  std::vector<eval::EvalReport> reports;
  for (const auto kind : es.kinds) {
    const auto manifest = ReadFeatureManifest(config, kind);
    for (const auto& src : es.sources) {
      const auto labels = SourceLabels(manifest, src);
      std::vector<corpus::FeatureDataset> data;
      data.reserve(es.domains.size());
      for (const auto& d : es.domains) data.push_back(corpus::LoadFeatureDataset(manifest, es.split, d, labels));
      std::vector<eval::EvalSet> sets;
      for (std::size_t i = 0; i < es.domains.size(); ++i) sets.push_back({es.domains[i], kind, &data[i]});

      std::vector<model::LidModel> models;
      models.reserve(es.variants.size());
      std::vector<eval::TrainedModel> trained;
      for (const auto variant : es.variants) {
        models.push_back(LoadRequiredCheckpoint(config.CheckpointPath(kind, variant, src)));
        if (models.back().variant() != variant) {
          throw DataError("checkpoint '" + config.CheckpointPath(kind, variant, src).string() +
                          "' holds a different variant");
        }
      }
      for (std::size_t i = 0; i < es.variants.size(); ++i) trained.push_back({src, kind, es.variants[i], &models[i]});
      auto part = eval::CrossDomainEval(trained, sets, labels, es.batch_size);
      reports.insert(reports.end(), part.begin(), part.end());
    }
  }
  const auto table = eval::FormatTable(reports) + "\n" + eval::FormatF1Table(reports);
  WriteText(config.RunDir() / "reports" / "eval.json", eval::ReportsToJson(reports));
  WriteText(config.RunDir() / "reports" / "eval.txt", table);
  out << table;
}

void RunProject(const Config& config) {
  PrepareRunDir(config);
  const auto& vs = config.viz;
  const auto manifest = ReadFeatureManifest(config, vs.kind);
  const auto labels = SourceLabels(manifest, vs.source);
  const auto net = LoadRequiredCheckpoint(config.CheckpointPath(vs.kind, vs.variant, vs.source));

  std::vector<RowMatrixXd> features;
  std::vector<int> domain_ids;
  std::vector<int> language_ids;
  std::vector<std::string> domain_names;
  std::vector<std::string> language_names;
  Rng rng = Rng::Derive(vs.projection.seed, kProjectionSampleStream);
  for (std::size_t d = 0; d < vs.domains.size(); ++d) {
    auto data = corpus::LoadFeatureDataset(manifest, vs.split, vs.domains[d], labels);
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.Shuffle(std::span<std::size_t>(order));
    order.resize(std::min(order.size(), static_cast<std::size_t>(vs.projection.samples_per_domain)));
    for (auto i : order) {
      features.push_back(std::move(data.features[i]));
      domain_ids.push_back(static_cast<int>(d));
      language_ids.push_back(data.labels[i]);
      domain_names.push_back(vs.domains[d]);
      language_names.push_back(labels.Name(data.labels[i]));
    }
  }
  if (features.empty()) throw DataError("no records to project");

  const auto stem = Stem(vs.kind, vs.variant, vs.source);
  const auto figures = config.RunDir() / "figures";
  const Tensor reps = eval::HiddenRepresentations(net, features);
  model::WriteRepresentations(reps, (figures / (stem + ".lidr")).string());

  spdlog::info("t-SNE of {} points", reps.dim(0));
  const auto result = viz::Tsne(reps.Matrix(), vs.projection);
  spdlog::info("KL divergence {:.4f} -> {:.4f}", result.initial_kl, result.final_kl);

  WriteText(figures / (stem + "-domain.svg"),
            viz::RenderScatterSvg(result.coords, domain_ids, vs.domains, stem + " by domain"));
  WriteText(figures / (stem + "-language.svg"),
            viz::RenderScatterSvg(result.coords, language_ids, labels.names(), stem + " by language"));
  WriteText(figures / (stem + "-tsne.csv"), viz::ScatterCsv(result.coords, domain_names, language_names));
}

}  // namespace lid::cli
