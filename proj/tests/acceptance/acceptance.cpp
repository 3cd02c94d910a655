// tests/acceptance/acceptance.cpp

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

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <sys/wait.h>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "../support/gradcheck.hpp"
#include "../support/model_checks.hpp"
#include "../support/oracles.hpp"
#include "lid/commands.hpp"
#include "lid/config.hpp"
#include "lid/evaluation.hpp"
#include "lid/features.hpp"
#include "lid/metrics.hpp"
#include "lid/probe.hpp"
#include "lid/scatter.hpp"
#include "lid/trainer.hpp"
#include "lid/tsne.hpp"

using namespace lid;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double Seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// 1-4: property suites

Verdict GradientChecks() {
  const auto start = Clock::now();
  const std::vector<std::pair<const char*, std::function<double(std::uint64_t)>>> layers = {
      {"conv1d", lid::testing::CheckConv1d},
      {"batchnorm", lid::testing::CheckBatchNorm},
      {"linear", lid::testing::CheckLinear},
      {"global_max_pool", lid::testing::CheckGlobalMaxPool},
      {"relu", lid::testing::CheckRelu},
      {"softmax_ce", lid::testing::CheckSoftmaxCrossEntropy}};
  constexpr int kShapes = 24;
  double worst = 0.0;
  std::string worst_layer;
  for (const auto& [name, check] : layers) {
    for (int s = 1; s <= kShapes; ++s) {
      const double err = check(static_cast<std::uint64_t>(1000 * s + 7));
      if (!(err <= worst)) {
        worst = err;
        worst_layer = name;
      }
    }
  }
  const double took = Seconds(start);
  return {worst < 1e-4 && took < 60.0,
          Fmt("%zu layers x %d shapes, worst relative error %.2e (%s), %.1f s", layers.size(), kShapes, worst,
              worst_layer.c_str(), took)};
}

Verdict ReversalContract() {
  const Tensor x = lid::testing::RandomTensor({3, 5, 7}, 1);
  bool ok = nn::GradientReversalForward(x) == x;
  for (double lambda : {0.0, 0.25, 1.0}) {
    const Tensor g = nn::GradientReversalBackward(x, lambda);
    for (Index i = 0; i < x.size(); ++i) ok = ok && g.values()[i] == -lambda * x.values()[i];
  }
  double shared = 0.0, domain = 0.0;
  for (auto variant : {model::Variant::kDA1, model::Variant::kDA2}) {
    for (double lambda : {0.25, 1.0}) {
      const auto r = lid::testing::CheckGradientAssembly(variant, lambda, 42);
      shared = std::max(shared, r.shared);
      domain = std::max(domain, r.domain);
    }
  }
  ok = ok && shared < 1e-10 && domain < 1e-10;
  return {ok, Fmt("identity forward, exact -lambda*g backward; assembly error shared %.1e, domain %.1e", shared,
                  domain)};
}

Verdict FrontendOracles() {
  Rng rng(3);
  Eigen::VectorXd x(48000);
  for (Index i = 0; i < x.size(); ++i) {
    x[i] = 0.1 * rng.Normal() + 0.3 * std::sin(2.0 * std::numbers::pi * 440.0 * static_cast<double>(i) / 16000.0);
  }
  bool shape_ok = true;
  double worst_mean = 0.0, worst_gain = 0.0;
  for (auto kind : {frontend::FeatureKind::kMfsc, frontend::FeatureKind::kMfcc}) {
    const auto raw = frontend::Extract(x, kind);
    shape_ok = shape_ok && raw.frames.rows() == 298 && raw.frames.cols() == 13;
    const auto norm = frontend::Cmvn(raw);
    worst_mean = std::max(worst_mean, norm.frames.colwise().mean().cwiseAbs().maxCoeff());
    const auto louder = frontend::Featurize(0.37 * x, kind);
    worst_gain = std::max(worst_gain, (louder.frames - norm.frames).cwiseAbs().maxCoeff());
  }
  const double mel = frontend::HzToMel(1000.0);
  const RowMatrixXd d = frontend::Dct2Matrix(40);
  Eigen::VectorXd v(40);
  for (auto& e : v) e = rng.Normal();
  const double dct = (d.transpose() * (d * v) - v).cwiseAbs().maxCoeff();
  const bool ok = shape_ok && std::abs(mel - 1000.0) <= 0.1 && dct < 1e-9 && worst_mean < 1e-6 && worst_gain < 1e-6;
  return {ok, Fmt("298x13 frames %s, mel(1000)=%.4f, dct round trip %.1e, cmvn mean %.1e, gain %.1e",
                  shape_ok ? "yes" : "no", mel, dct, worst_mean, worst_gain)};
}

Verdict MetricOracles() {
  Rng rng(11);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.Below(7));
    const std::size_t n = static_cast<std::size_t>(k) + rng.Below(300);
    std::vector<int> y(n), yhat(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = i < static_cast<std::size_t>(k) ? static_cast<int>(i) : static_cast<int>(rng.Below(static_cast<std::uint64_t>(k)));
      yhat[i] = static_cast<int>(rng.Below(static_cast<std::uint64_t>(k)));
    }
    const auto cm = eval::ConfusionMatrix::FromPairs(y, yhat, k);
    if (eval::BalancedAccuracy(cm) != lid::testing::BruteBalancedAccuracy(y, yhat, k)) ++mismatches;
    const auto f1 = eval::F1PerClass(cm);
    const auto brute = lid::testing::BruteF1(y, yhat, k);
    for (int c = 0; c < k; ++c) {
      if (f1[c] != brute[static_cast<std::size_t>(c)]) ++mismatches;
    }
  }
  const std::vector<int> y = {0, 0, 1, 1}, yhat = {0, 1, 1, 1};
  const auto cm = eval::ConfusionMatrix::FromPairs(y, yhat, 2);
  const double ba = eval::BalancedAccuracy(cm);
  const double f1b = eval::F1PerClass(cm)[1];
  return {mismatches == 0 && ba == 0.75 && std::abs(f1b - 0.8) < 1e-15,
          Fmt("100 random label sets, %d mismatches; worked example BA=%.4f F1(B)=%.4f", mismatches, ba, f1b)};
}

// ---------------------------------------------------------------------------
// 5-7: synthetic reproduction

struct Domains {
  corpus::FeatureDataset source_train, source_valid, source_eval;
  corpus::FeatureDataset target_valid, target_eval;
  corpus::UnlabeledFeatures target_train;
};

struct RunResult {
  std::string kind;
  std::string variant;
  std::uint64_t seed = 0;
  double in_domain = 0.0;
  double ood = 0.0;
  double probe = 0.0;
  int best_epoch = 0;
  double seconds = 0.0;
};

class Experiment {
 public:
  Experiment(fs::path work, int jobs, bool reuse) : work_(std::move(work)), jobs_(jobs) {
    config_ = cli::ParseConfig("");
    config_.data.name = "corpus";
    config_.data.run_root = work_;
    config_.SetSeed(1);
    config_.architecture.filters = {32, 64, 128};
    const auto start = Clock::now();
    if (!reuse || !fs::exists(config_.FeatureManifest(frontend::FeatureKind::kMfcc))) {
      fs::remove_all(config_.RunDir());
      cli::RunSynth(config_, jobs_);
      cli::RunFeaturize(config_, jobs_);
    }
    corpus_seconds_ = Seconds(start);
  }

  double corpus_seconds() const { return corpus_seconds_; }

  const Domains& Data(frontend::FeatureKind kind) {
    auto it = data_.find(kind);
    if (it != data_.end()) return it->second;
    const auto m = corpus::ReadManifest(config_.FeatureManifest(kind));
    const corpus::LabelSet labels(config_.synth.LanguageNames());
    const auto& src = config_.train.source;
    const auto& tgt = config_.train.target;
    Domains d;
    d.source_train = corpus::LoadFeatureDataset(m, corpus::Split::kTrain, src, labels);
    d.source_valid = corpus::LoadFeatureDataset(m, corpus::Split::kValid, src, labels);
    d.source_eval = corpus::LoadFeatureDataset(m, corpus::Split::kEval, src, labels);
    d.target_train = corpus::LoadUnlabeledFeatures(m, corpus::Split::kTrain, tgt);
    d.target_valid = corpus::LoadFeatureDataset(m, corpus::Split::kValid, tgt, labels);
    d.target_eval = corpus::LoadFeatureDataset(m, corpus::Split::kEval, tgt, labels);
    return data_.emplace(kind, std::move(d)).first->second;
  }

  /// Trains (or fetches) one model.
  const RunResult& Run(frontend::FeatureKind kind, model::Variant variant, std::uint64_t seed) {
    const auto key = std::make_tuple(kind, variant, seed);
    if (auto it = results_.find(key); it != results_.end()) return it->second;
    const auto& d = Data(kind);
    const auto start = Clock::now();
    Rng init = Rng::Derive(seed, 1);
    auto arch = config_.architecture;
    model::LidModel m(arch, variant, init);
    auto cfg = config_.train.train;
    cfg.epochs = 15;
    cfg.seed = seed;
    cfg.variant = variant;
    const auto log = variant == model::Variant::kNone
                         ? train::TrainSupervised(m, d.source_train, d.source_valid, cfg)
                         : train::TrainDann(m, d.source_train, d.target_train, d.source_valid, cfg);

    RunResult r;
    r.kind = frontend::FeatureKindName(kind);
    r.variant = model::VariantName(variant);
    r.seed = seed;
    r.in_domain = Balanced(m, d.source_eval);
    r.ood = Balanced(m, d.target_eval);
    r.probe = Probe(m, d);
    r.best_epoch = log.best_epoch;
    r.seconds = Seconds(start);
    std::printf("  run %s %s seed %llu: in-domain %.4f, OOD %.4f, domain probe %.4f, best epoch %d, %.0f s\n",
                r.kind.c_str(), r.variant.c_str(), static_cast<unsigned long long>(seed), r.in_domain, r.ood, r.probe,
                r.best_epoch, r.seconds);
    std::fflush(stdout);
    if (kind == frontend::FeatureKind::kMfcc && seed == 1) Project(m, d, r.variant);
    return results_.emplace(key, r).first->second;
  }

  std::vector<RunResult> Results() const {
    std::vector<RunResult> out;
    for (const auto& [k, v] : results_) out.push_back(v);
    return out;
  }

 private:
  static double Balanced(const model::LidModel& m, const corpus::FeatureDataset& ds) {
    const auto pred = eval::PredictAll(m, ds.features);
    return eval::BalancedAccuracy(eval::ConfusionMatrix::FromPairs(ds.labels, pred, 6));
  }

  // Last-hidden-layer rows of the source set followed by the target set,
  // with domain labels 0 and 1.
  static RowMatrixXd Stack(const model::LidModel& m, const corpus::FeatureDataset& a,
                           const corpus::FeatureDataset& b, std::vector<int>& domains) {
    std::vector<RowMatrixXd> f = a.features;
    f.insert(f.end(), b.features.begin(), b.features.end());
    domains.assign(a.size(), 0);
    domains.resize(a.size() + b.size(), 1);
    return eval::HiddenRepresentations(m, f).Matrix();
  }

  // A fresh linear domain classifier fitted on the validation splits of both
  // domains and scored on the evaluation splits.
  static double Probe(const model::LidModel& m, const Domains& d) {
    std::vector<int> fit_domains, test_domains;
    const RowMatrixXd fit = Stack(m, d.source_valid, d.target_valid, fit_domains);
    const RowMatrixXd test = Stack(m, d.source_eval, d.target_eval, test_domains);
    return eval::ProbeBalancedAccuracy(eval::FitProbe(fit, fit_domains), test, test_domains);
  }

  void Project(const model::LidModel& m, const Domains& d, const std::string& variant) {
    std::vector<int> domains;
    const RowMatrixXd reps = Stack(m, d.source_eval, d.target_eval, domains);
    auto cfg = config_.viz.projection;
    cfg.seed = 300;
    const auto t = viz::Tsne(reps, cfg);
    std::vector<int> languages = d.source_eval.labels;
    languages.insert(languages.end(), d.target_eval.labels.begin(), d.target_eval.labels.end());
    const fs::path dir = work_ / "figures";
    fs::create_directories(dir);
    const std::vector<std::string> domain_names = {config_.train.source, config_.train.target};
    std::ofstream(dir / ("mfcc-" + variant + "-domain.svg"))
        << viz::RenderScatterSvg(t.coords, domains, domain_names, "mfcc " + variant + " by domain");
    std::ofstream(dir / ("mfcc-" + variant + "-language.svg"))
        << viz::RenderScatterSvg(t.coords, languages, config_.synth.LanguageNames(), "mfcc " + variant + " by language");
  }

  fs::path work_;
  int jobs_;
  cli::Config config_;
  double corpus_seconds_ = 0.0;
  std::map<frontend::FeatureKind, Domains> data_;
  std::map<std::tuple<frontend::FeatureKind, model::Variant, std::uint64_t>, RunResult> results_;
};

constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Verdict CrossDomain(Experiment& ex) {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;
  for (auto kind : {frontend::FeatureKind::kMfsc, frontend::FeatureKind::kMfcc}) {
    const auto& r = ex.Run(kind, model::Variant::kNone, 1);
    ok = ok && r.in_domain >= 0.90 && r.ood <= r.in_domain - 0.15;
    detail += Fmt("%s in-domain %.2f%% OOD %.2f%% (delta %+.2f); ", r.kind.c_str(), 100.0 * r.in_domain,
                  100.0 * r.ood, 100.0 * (r.ood - r.in_domain));
  }
  const double minutes = (Seconds(start) + ex.corpus_seconds()) / 60.0;
  ok = ok && minutes < 30.0;
  return {ok, detail + Fmt("%.1f min with corpus", minutes)};
}

Verdict Adaptation(Experiment& ex) {
  const auto mfcc = frontend::FeatureKind::kMfcc;
  int wins = 0;
  std::vector<double> da1, da2;
  std::string gains;
  for (auto seed : kSeeds) {
    const double none = ex.Run(mfcc, model::Variant::kNone, seed).ood;
    const double a1 = ex.Run(mfcc, model::Variant::kDA1, seed).ood;
    const double a2 = ex.Run(mfcc, model::Variant::kDA2, seed).ood;
    da1.push_back(a1);
    da2.push_back(a2);
    if (a2 - none >= 0.05) ++wins;
    gains += Fmt("%s%+.1f", gains.empty() ? "" : " ", 100.0 * (a2 - none));
  }
  const double m1 = Median(da1), m2 = Median(da2);
  return {wins >= 4 && m2 >= m1, Fmt("DA2 - NONE OOD gain per seed [%s] points, %d/5 >= 5; median OOD DA1 %.2f%% DA2 %.2f%%",
                                     gains.c_str(), wins, 100.0 * m1, 100.0 * m2)};
}

Verdict DomainConfusion(Experiment& ex) {
  const auto mfcc = frontend::FeatureKind::kMfcc;
  std::vector<double> adapted, plain;
  for (auto seed : kSeeds) {
    plain.push_back(ex.Run(mfcc, model::Variant::kNone, seed).probe);
    adapted.push_back(ex.Run(mfcc, model::Variant::kDA2, seed).probe);
  }
  const double a = Median(adapted), p = Median(plain);
  return {a <= 0.65 && p >= 0.85,
          Fmt("median probe balanced accuracy: DA2 %.2f%% (<= 65), NONE %.2f%% (>= 85) over 5 seeds", 100.0 * a,
              100.0 * p)};
}

// ---------------------------------------------------------------------------
// 8: t-SNE

Verdict TsneChecks() {
  const RowMatrixXd x = lid::testing::RandomTensor({1000, 512}, 8).Matrix();
  viz::ProjectionConfig cfg;
  cfg.seed = 8;
  const auto p = viz::SymmetrizeAffinities(viz::ConditionalAffinities(viz::SquaredDistances(x), cfg.perplexity));
  const double sum_err = std::abs(p.sum() - 1.0);
  const double asym = (p - p.transpose()).cwiseAbs().maxCoeff();
  const auto run = viz::Tsne(x, cfg);

  RowMatrixXd clusters = lid::testing::RandomTensor({200, 512}, 9).Matrix();
  clusters.bottomRows(100).leftCols(4).array() += 30.0;
  std::vector<int> labels(200, 0);
  std::fill(labels.begin() + 100, labels.end(), 1);
  viz::ProjectionConfig two;
  two.seed = 9;
  const double sil = lid::testing::Silhouette(viz::Tsne(clusters, two).coords, labels);

  const bool ok = sum_err <= 1e-12 && asym <= 1e-15 && run.final_kl < run.initial_kl && sil > 0.5;
  return {ok, Fmt("|sum P - 1| %.1e, asymmetry %.1e, KL %.4f -> %.4f, two-cluster silhouette %.3f", sum_err, asym,
                  run.initial_kl, run.final_kl, sil)};
}

// ---------------------------------------------------------------------------
// 9: CLI determinism

int Shell(const std::string& cmd) {
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Verdict CliDeterminism(const fs::path& work, const std::string& lid) {
  const char* config = R"(
name = pipeline
train_per_language = 12
valid_per_language = 3
eval_per_language = 4

[model]
filters = 8, 16, 32
hidden = 32
domain_hidden = 32

[train]
kind = mfcc
variant = none
epochs = 2
batch_size = 24

[eval]
kinds = mfcc
variants = none
)";
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* name : {"a", "b"}) {
    const fs::path dir = work / "cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "lid.ini") << "[data]\nrun_root = " << (dir / "runs").string() << config;
    const std::string base = "LID_LOG_LEVEL=warn " + lid + " ";
    const std::string tail = " --seed 7 --config " + (dir / "lid.ini").string() + " > " + (dir / "out.txt").string() + " 2>&1";
    for (const char* step : {"synth", "featurize", "train", "evaluate"}) {
      const int status = Shell(base + step + tail);
      if (status != 0) return {false, Fmt("run %s: `lid %s` exited with %d", name, step, status)};
    }
    std::map<std::string, std::string> files;
    const fs::path run = dir / "runs" / "pipeline";
    for (const auto* rel : {"reports/eval.json", "reports/eval.txt", "logs/mfcc-none-clean-steps.csv",
                            "logs/mfcc-none-clean-epochs.json", "checkpoints/mfcc-none-clean.lidm", "corpus/manifest.tsv",
                            "features/mfcc/manifest.tsv"}) {
      files[rel] = Slurp(run / rel);
    }
    runs.push_back(std::move(files));
  }
  std::vector<std::string> differing;
  for (const auto& [rel, bytes] : runs[0]) {
    if (bytes.empty() || runs[1].at(rel) != bytes) differing.push_back(rel);
  }
  std::string detail = "synth -> featurize -> train NONE 2 epochs -> evaluate, twice: ";
  if (differing.empty()) return {true, detail + "reports, logs and checkpoint byte-identical"};
  for (const auto& d : differing) detail += d + " ";
  return {false, detail + "differ or are empty"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria runner"};
  fs::path work = "acceptance-work";
  std::vector<int> only;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool reuse = false;
  std::string lid = LID_BINARY;
  app.add_option("--work", work, "scratch directory for corpora and runs");
  app.add_option("--only", only, "criteria to run (default: all)")->check(CLI::Range(1, 9));
  app.add_option("--jobs", jobs, "synthesis and featurization workers")->check(CLI::PositiveNumber);
  app.add_flag("--reuse-corpus", reuse, "keep an existing synthetic corpus in the work directory");
  app.add_option("--lid", lid, "path of the lid executable");
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::warn);
  fs::create_directories(work);
  work = fs::absolute(work);

  const std::set<int> selected(only.begin(), only.end());
  auto wanted = [&](int c) { return selected.empty() || selected.count(c) > 0; };

  std::unique_ptr<Experiment> experiment;
  auto ex = [&]() -> Experiment& {
    if (!experiment) experiment = std::make_unique<Experiment>(work, jobs, reuse);
    return *experiment;
  };

  const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, GradientChecks},
      {2, ReversalContract},
      {3, FrontendOracles},
      {4, MetricOracles},
      {5, [&] { return CrossDomain(ex()); }},
      {6, [&] { return Adaptation(ex()); }},
      {7, [&] { return DomainConfusion(ex()); }},
      {8, TsneChecks},
      {9, [&] { return CliDeterminism(work, lid); }}};

  int failures = 0;
  std::vector<std::string> lines;
  for (const auto& [id, check] : criteria) {
    if (!wanted(id)) continue;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failures;
    const std::string line = Fmt("criterion %d: %s  %s", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    lines.push_back(line);
  }

  if (experiment) {
    nlohmann::ordered_json measured;
    measured["corpus_seed"] = 1;
    for (const auto& r : experiment->Results()) {
      measured["runs"].push_back({{"features", r.kind},
                                  {"variant", r.variant},
                                  {"seed", r.seed},
                                  {"in_domain_balanced_accuracy", r.in_domain},
                                  {"ood_balanced_accuracy", r.ood},
                                  {"domain_probe_balanced_accuracy", r.probe},
                                  {"best_epoch", r.best_epoch},
                                  {"seconds", r.seconds}});
    }
    std::ofstream(work / "measured.json") << measured.dump(2) << "\n";
  }
  std::printf("summary: %zu criteria, %d failed\n", lines.size(), failures);
  return failures == 0 ? 0 : 1;
}
