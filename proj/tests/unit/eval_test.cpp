// tests/unit/eval_test.cpp

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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "../support/model_checks.hpp"
#include "../support/oracles.hpp"
#include "lid/evaluation.hpp"
#include "lid/metrics.hpp"
#include "lid/probe.hpp"

using namespace lid;
using namespace lid::eval;

namespace {

std::vector<int> RandomLabels(std::size_t n, int k, Rng& rng) {
  std::vector<int> out(n);
  for (auto& v : out) v = static_cast<int>(rng.Below(static_cast<std::uint64_t>(k)));
  return out;
}

corpus::FeatureDataset RandomSet(int per_class, int classes, frontend::FeatureKind kind, std::uint64_t seed) {
  corpus::FeatureDataset ds;
  ds.kind = kind;
  for (int i = 0; i < per_class * classes; ++i) {
    ds.features.push_back(lid::testing::RandomTensor({12, 13}, seed + static_cast<std::uint64_t>(i)).Matrix());
    ds.labels.push_back(i % classes);
  }
  return ds;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("worked example") {
  // A = 0, B = 1.
  const std::vector<int> y = {0, 0, 1, 1}, yhat = {0, 1, 1, 1};
  const auto cm = ConfusionMatrix::FromPairs(y, yhat, 2);
  CHECK(cm(0, 0) == 1);
  CHECK(cm(0, 1) == 1);
  CHECK(cm(1, 1) == 2);
  CHECK(cm.total() == 4);
  CHECK(BalancedAccuracy(cm) == 0.75);
  CHECK(Accuracy(cm) == 0.75);
  const auto f1 = F1PerClass(cm);
  CHECK(f1[1] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(f1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("trivial cases") {
  const std::vector<int> y = {0, 1, 2, 2};
  const auto perfect = ConfusionMatrix::FromPairs(y, y, 4);
  CHECK_THROWS_AS(BalancedAccuracy(perfect), DataError);
  const auto f1 = F1PerClass(perfect);
  CHECK(f1[3] == 0.0);
  CHECK(f1.head(3).isOnes());
  CHECK(BalancedAccuracy(ConfusionMatrix::FromPairs(y, y, 3)) == 1.0);
  try {
    BalancedAccuracy(perfect);
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("class 3") != std::string::npos);
  }
  CHECK_THROWS_AS(ConfusionMatrix::FromPairs(y, std::vector<int>{0, 1}, 3), DimensionError);
  CHECK_THROWS_AS(ConfusionMatrix::FromPairs(y, std::vector<int>{0, 1, 5, 0}, 3), DataError);
}

TEST_CASE("metrics match direct iteration") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.Below(6));
    const std::size_t n = 20 + rng.Below(200);
    auto y = RandomLabels(n, k, rng);
    for (int c = 0; c < k; ++c) y[static_cast<std::size_t>(c)] = c;
    const auto yhat = RandomLabels(n, k, rng);
    const auto cm = ConfusionMatrix::FromPairs(y, yhat, k);
    CHECK(cm.total() == static_cast<std::int64_t>(n));
    CHECK(BalancedAccuracy(cm) == lid::testing::BruteBalancedAccuracy(y, yhat, k));
    const auto f1 = F1PerClass(cm);
    const auto brute = lid::testing::BruteF1(y, yhat, k);
    for (int c = 0; c < k; ++c) CHECK(f1[c] == brute[static_cast<std::size_t>(c)]);
  }
}

TEST_CASE("class permutation") {
  Rng rng(3);
  const int k = 5;
  auto y = RandomLabels(300, k, rng);
  for (int c = 0; c < k; ++c) y[static_cast<std::size_t>(c)] = c;
  const auto yhat = RandomLabels(300, k, rng);
  std::vector<int> perm = {3, 0, 4, 1, 2};
  std::vector<int> py(y.size()), pyhat(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    py[i] = perm[static_cast<std::size_t>(y[i])];
    pyhat[i] = perm[static_cast<std::size_t>(yhat[i])];
  }
  const auto a = ConfusionMatrix::FromPairs(y, yhat, k), b = ConfusionMatrix::FromPairs(py, pyhat, k);
  CHECK(BalancedAccuracy(a) == doctest::Approx(BalancedAccuracy(b)).epsilon(1e-15));
  const auto fa = F1PerClass(a), fb = F1PerClass(b);
  for (int c = 0; c < k; ++c) CHECK(fa[c] == fb[perm[static_cast<std::size_t>(c)]]);
}

TEST_CASE("balanced sets give plain accuracy") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + trial % 5;
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) {
      for (int c = 0; c < k; ++c) y.push_back(c);
    }
    const auto yhat = RandomLabels(y.size(), k, rng);
    const auto cm = ConfusionMatrix::FromPairs(y, yhat, k);
    CHECK(BalancedAccuracy(cm) == doctest::Approx(Accuracy(cm)).epsilon(1e-12));
  }
}

TEST_CASE("uniform random predictions score near chance") {
  Rng rng(21);
  for (int k : {2, 6, 10}) {
    const std::size_t n = 60000;
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % static_cast<std::size_t>(k));
    const auto yhat = RandomLabels(n, k, rng);
    const double ba = BalancedAccuracy(ConfusionMatrix::FromPairs(y, yhat, k));
    // Each class recall has variance p(1-p)/(n/k); the mean over k classes
    // divides that by k.
    const double p = 1.0 / k;
    const double sigma = std::sqrt(p * (1.0 - p) / (static_cast<double>(n) / k) / k);
    CHECK(std::abs(ba - p) < 3.0 * sigma);
  }
}

TEST_CASE("cross-domain harness") {
  using frontend::FeatureKind;
  const auto arch = lid::testing::TinyArchitecture();
  const corpus::LabelSet labels({"a", "b", "c"});
  std::vector<model::LidModel> models;
  std::vector<TrainedModel> trained;
  Rng rng(5);
  for (auto kind : {FeatureKind::kMfsc, FeatureKind::kMfcc}) {
    for (auto variant : {model::Variant::kNone, model::Variant::kDA2}) {
      for (std::string domain : {"clean", "noisy"}) {
        models.emplace_back(arch, variant, rng);
        trained.push_back({domain, kind, variant, nullptr});
      }
    }
  }
  for (std::size_t i = 0; i < models.size(); ++i) trained[i].model = &models[i];

  const auto mfsc_clean = RandomSet(5, 3, FeatureKind::kMfsc, 100), mfsc_noisy = RandomSet(5, 3, FeatureKind::kMfsc, 200);
  const auto mfcc_clean = RandomSet(5, 3, FeatureKind::kMfcc, 300), mfcc_noisy = RandomSet(5, 3, FeatureKind::kMfcc, 400);
  const std::vector<EvalSet> sets = {{"clean", FeatureKind::kMfsc, &mfsc_clean},
                                     {"noisy", FeatureKind::kMfsc, &mfsc_noisy},
                                     {"clean", FeatureKind::kMfcc, &mfcc_clean},
                                     {"noisy", FeatureKind::kMfcc, &mfcc_noisy}};
  const auto reports = CrossDomainEval(trained, sets, labels);
  REQUIRE(reports.size() == 16);
  for (std::size_t i = 0; i < reports.size(); i += 2) {
    const auto& home = reports[i];
    const auto& away = reports[i + 1];
    CHECK(home.in_domain());
    CHECK_FALSE(away.in_domain());
    CHECK(home.delta == 0.0);
    CHECK(away.delta == away.balanced_accuracy - home.balanced_accuracy);
    CHECK(home.confusion.total() == 15);
    CHECK(home.balanced_accuracy >= 0.0);
    CHECK(home.balanced_accuracy <= 1.0);
    CHECK((home.f1.array() >= 0.0).all());
    CHECK((home.f1.array() <= 1.0).all());
  }

  const auto table = FormatTable(reports);
  CHECK(std::count(table.begin(), table.end(), '\n') == 1 + 8);
  const auto json = nlohmann::json::parse(ReportsToJson(reports));
  CHECK(json.dump().size() > 0);

  // The same data under both domain names: nothing changes out of domain.
  const std::vector<EvalSet> same = {{"clean", FeatureKind::kMfsc, &mfsc_clean},
                                     {"noisy", FeatureKind::kMfsc, &mfsc_clean}};
  const auto twin = CrossDomainEval(std::span(trained).first(1), same, labels);
  REQUIRE(twin.size() == 2);
  CHECK(twin[1].delta == 0.0);

  const std::vector<EvalSet> mislabeled = {{"clean", FeatureKind::kMfsc, &mfcc_clean}};
  CHECK_THROWS_AS(CrossDomainEval(std::span(trained).first(1), mislabeled, labels), DataError);
  const std::vector<EvalSet> missing = {{"noisy", FeatureKind::kMfsc, &mfsc_noisy}};
  CHECK_THROWS_AS(CrossDomainEval(std::span(trained).first(1), missing, labels), DataError);
  const corpus::LabelSet wrong({"a", "b"});
  CHECK_THROWS_AS(CrossDomainEval(std::span(trained).first(1), same, wrong), DataError);
}

TEST_CASE("prediction batching does not change results") {
  Rng rng(2);
  model::LidModel m(lid::testing::TinyArchitecture(), model::Variant::kDA1, rng);
  const auto ds = RandomSet(7, 3, frontend::FeatureKind::kMfcc, 50);
  const auto all = PredictAll(m, ds.features, 64);
  CHECK(PredictAll(m, ds.features, 1) == all);
  CHECK(PredictAll(m, ds.features, 4) == all);
  const auto h1 = HiddenRepresentations(m, ds.features, 1), h2 = HiddenRepresentations(m, ds.features, 64);
  CHECK(h1.shape() == Tensor::Shape{21, 7});
  CHECK((h1.values() - h2.values()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(ConvRepresentations(m, ds.features).shape() == Tensor::Shape{21, 6});
}

TEST_CASE("linear probe") {
  const RowMatrixXd a = lid::testing::RandomTensor({400, 16}, 1).Matrix();
  RowMatrixXd b = lid::testing::RandomTensor({400, 16}, 2).Matrix();
  std::vector<int> labels(400);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 2);

  // Label decided by the sign of a fixed direction: nearly perfect.
  std::vector<int> linear(400);
  for (Index i = 0; i < 400; ++i) linear[static_cast<std::size_t>(i)] = a(i, 0) - 0.5 * a(i, 3) > 0.0 ? 1 : 0;
  const auto probe = FitProbe(a, linear);
  std::vector<int> held(400);
  for (Index i = 0; i < 400; ++i) held[static_cast<std::size_t>(i)] = b(i, 0) - 0.5 * b(i, 3) > 0.0 ? 1 : 0;
  CHECK(ProbeBalancedAccuracy(probe, b, held) > 0.95);

  // Labels independent of the inputs: held-out score near chance.
  const auto chance = FitProbe(a, labels);
  CHECK(std::abs(ProbeBalancedAccuracy(chance, b, labels) - 0.5) < 0.1);

  // Scale and shift of the inputs do not matter.
  const RowMatrixXd shifted = (3.0 * a).array() + 5.0;
  CHECK(FitProbe(shifted, linear).Predict((3.0 * b).array() + 5.0) == probe.Predict(b));

  CHECK_THROWS_AS(FitProbe(a, std::vector<int>(400, 1)), DataError);
  CHECK_THROWS_AS(FitProbe(a, std::vector<int>(3, 1)), DimensionError);
  CHECK_THROWS_AS(probe.Predict(RowMatrixXd::Zero(2, 5)), DimensionError);
}

}  // TEST_SUITE
