// tests/unit/model_test.cpp

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

#include <cmath>

#include "../support/model_checks.hpp"
#include "../support/tempdir.hpp"
#include "lid/model.hpp"

using namespace lid;
using namespace lid::model;
using lid::testing::RandomTensor;
using lid::testing::TinyArchitecture;

TEST_SUITE("model") {

TEST_CASE("paper architecture parameter counts") {
  Rng rng(1);
  const LidModel none(Architecture{}, Variant::kNone, rng);
  const LidModel da1(Architecture{}, Variant::kDA1, rng);
  const LidModel da2(Architecture{}, Variant::kDA2, rng);
  CHECK(none.LanguagePathParameterCount() == 1915142);
  CHECK(da1.LanguagePathParameterCount() == 1915142);
  CHECK(da2.LanguagePathParameterCount() == 1915142);
  CHECK(none.DomainClassifierParameterCount() == 0);
  CHECK(da1.DomainClassifierParameterCount() == 1576962);
  CHECK(da2.DomainClassifierParameterCount() == 1576962);
}

TEST_CASE("paper architecture forward shapes") {
  Rng rng(2);
  LidModel m(Architecture{}, Variant::kDA2, rng);
  const auto a = m.Infer(RandomTensor({2, 13, 298}, 3), true);
  CHECK(a.language_logits.shape() == Tensor::Shape{2, 6});
  CHECK(a.representation().shape() == Tensor::Shape{2, 512});
  CHECK(a.last_hidden().shape() == Tensor::Shape{2, 512});
  CHECK(a.domain_logits->shape() == Tensor::Shape{2, 2});
  CHECK(a.block_out[2].dim(2) == 276);
}

TEST_CASE("variants") {
  Rng rng(3);
  LidModel none(TinyArchitecture(), Variant::kNone, rng);
  const Tensor x = RandomTensor({2, 13, 12}, 4);
  CHECK_FALSE(none.Infer(x, true).domain_logits.has_value());
  CHECK(none.DomainParameters().empty());
  CHECK(ParseVariant("da2") == Variant::kDA2);
  CHECK(VariantName(Variant::kDA1) == "da1");
  CHECK_THROWS_AS(ParseVariant("da3"), ConfigError);
}

TEST_CASE("input too short") {
  Rng rng(4);
  LidModel m(Architecture{}, Variant::kNone, rng);
  CHECK(Architecture{}.MinInputLength() == 23);
  CHECK_THROWS_AS(m.Infer(Tensor({1, 13, 22})), InputTooShortError);
  CHECK_THROWS_AS(m.Infer(Tensor({1, 12, 30})), DimensionError);
}

TEST_CASE("prediction") {
  Tensor logits({3, 4});
  logits.Matrix() << 0.1, 3.0, 0.2, 0.3,  //
      1, 1, 1, 1,                          //
      -5, 2, 2, 1;
  CHECK(ArgmaxRows(logits) == std::vector<int>{1, 0, 1});
  Tensor shifted = logits;
  shifted.values().array() += 100.0;
  CHECK(ArgmaxRows(shifted) == ArgmaxRows(logits));
}

TEST_CASE("lambda schedule") {
  const LambdaSchedule s{10.0, 1000};
  CHECK(LambdaAt(s, 0) == 0.0);
  CHECK(LambdaAt(s, 500) == doctest::Approx(0.98661).epsilon(1e-5));
  CHECK(LambdaAt(s, 1000) == doctest::Approx(0.99991).epsilon(1e-5));
  for (int i = 1; i <= 1000; ++i) CHECK(LambdaAt(s, i) > LambdaAt(s, i - 1));
  CHECK_THROWS_AS(LambdaAt({10.0, 0}, 0), ConfigError);
  CHECK_THROWS_AS(LambdaAt(s, 1001), ConfigError);
  CHECK_THROWS_AS(LambdaAt(s, -1), ConfigError);
}

TEST_CASE("train-mode forward updates running statistics, infer does not") {
  Rng rng(5);
  LidModel m(TinyArchitecture(), Variant::kNone, rng);
  const Tensor x = RandomTensor({3, 13, 15}, 6);
  const Eigen::VectorXd before = m.batch_norm(0).running_mean;
  m.Infer(x);
  CHECK(m.batch_norm(0).running_mean == before);
  m.Forward(x, nn::Mode::kTrain, true, false);
  CHECK(m.batch_norm(0).running_mean == before);
  m.Forward(x, nn::Mode::kTrain);
  CHECK(m.batch_norm(0).running_mean != before);
}

TEST_CASE("zero reversal factor keeps domain gradients out of the shared layers") {
  for (auto v : {Variant::kDA1, Variant::kDA2}) {
    Rng rng(7);
    LidModel m(TinyArchitecture(), v, rng);
    const auto a = m.Forward(RandomTensor({4, 13, 14}, 8), nn::Mode::kTrain);
    const auto ld = nn::SoftmaxCrossEntropy(*a.domain_logits, std::vector<int>{0, 1, 0, 1});
    m.ZeroGrad();
    m.Backward(a, nullptr, &ld.grad, 0.0);
    for (auto* p : m.SharedParameters()) CHECK(p->grad.values().isZero(0.0));
    bool domain_moved = false;
    for (auto* p : m.DomainParameters()) domain_moved |= !p->grad.values().isZero(0.0);
    CHECK(domain_moved);
  }
}

TEST_CASE("where reversed gradients reach") {
  auto reached = [](Variant v) {
    Rng rng(9);
    LidModel m(TinyArchitecture(), v, rng);
    const auto a = m.Forward(RandomTensor({4, 13, 14}, 10), nn::Mode::kTrain);
    const auto ld = nn::SoftmaxCrossEntropy(*a.domain_logits, std::vector<int>{0, 1, 0, 1});
    m.ZeroGrad();
    m.Backward(a, nullptr, &ld.grad, 1.0);
    return std::array<bool, 3>{!m.conv(0).weight.grad.values().isZero(0.0),
                               !m.fc1().weight.grad.values().isZero(0.0),
                               !m.fc2().weight.grad.values().isZero(0.0)};
  };
  CHECK(reached(Variant::kDA1) == std::array<bool, 3>{true, false, false});
  CHECK(reached(Variant::kDA2) == std::array<bool, 3>{true, true, false});
}

TEST_CASE("combined gradient equals the two separate terms") {
  for (auto v : {Variant::kDA1, Variant::kDA2}) {
    for (double lambda : {0.0, 0.25, 1.0, 0.7}) {
      const auto r = lid::testing::CheckGradientAssembly(v, lambda, 11);
      CHECK(r.shared < 1e-10);
      CHECK(r.domain < 1e-10);
    }
  }
}

TEST_CASE("whole-model gradient matches finite differences") {
  for (auto v : {Variant::kNone, Variant::kDA1, Variant::kDA2}) {
    Rng rng(12);
    LidModel m(TinyArchitecture(), v, rng);
    const Tensor x = RandomTensor({3, 13, 11}, 13);
    const std::vector<int> y = {2, 0, 1};
    const std::vector<int> d = {1, 0, 1};
    const double lambda = 0.6;
    auto loss = [&](LidModel& net) {
      const auto a = net.Forward(x, nn::Mode::kTrain, true, false);
      double l = nn::SoftmaxCrossEntropy(a.language_logits, y).loss;
      return a.domain_logits ? std::pair{l, nn::SoftmaxCrossEntropy(*a.domain_logits, d).loss} : std::pair{l, 0.0};
    };
    const auto a = m.Forward(x, nn::Mode::kTrain, true, false);
    const auto ly = nn::SoftmaxCrossEntropy(a.language_logits, y);
    m.ZeroGrad();
    if (a.domain_logits) {
      const auto ld = nn::SoftmaxCrossEntropy(*a.domain_logits, d);
      m.Backward(a, &ly.grad, &ld.grad, lambda);
    } else {
      m.Backward(a, &ly.grad, nullptr, 0.0);
    }
    // Shared parameters see L_y - lambda L_d; the domain classifier sees L_d.
    const auto shared = m.SharedParameters();
    const auto params = m.Parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      const bool is_shared = i < shared.size();
      auto* p = params[i];
      const Tensor numeric = lid::testing::NumericGradient([&](const Tensor& val) {
        const Tensor saved = p->value;
        p->value = val;
        const auto [l_y, l_d] = loss(m);
        p->value = saved;
        return is_shared ? l_y - lambda * l_d : l_d;
      }, p->value);
      CAPTURE(i);
      CHECK(lid::testing::MaxRelativeError(p->grad, numeric, 1e-6) < 1e-4);
    }
  }
}

TEST_CASE("checkpoint round trip") {
  lid::testing::TempDir dir;
  for (auto v : {Variant::kNone, Variant::kDA1, Variant::kDA2}) {
    Rng rng(14);
    LidModel m(TinyArchitecture(), v, rng);
    m.Forward(RandomTensor({3, 13, 15}, 15), nn::Mode::kTrain);
    const auto path = (dir / "m.lidm").string();
    SaveCheckpoint(m, path);
    LidModel back = LoadCheckpoint(path);
    CHECK(back.variant() == v);
    auto expected = m.architecture();
    if (v == Variant::kNone) expected.domain_hidden = back.architecture().domain_hidden;  // not stored
    CHECK(back.architecture() == expected);
    auto a = m.State();
    auto b = back.State();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].name == b[i].name);
      CHECK(a[i].shape == b[i].shape);
      CHECK(std::equal(a[i].data, a[i].data + a[i].size, b[i].data));
    }
    const std::string bytes = lid::testing::ReadBytes(path);
    CHECK(bytes.substr(0, 4) == "LIDM");
    CHECK(static_cast<unsigned char>(bytes[6]) == static_cast<unsigned>(v));
    SaveCheckpoint(back, (dir / "again.lidm").string());
    CHECK(lid::testing::ReadBytes(dir / "again.lidm") == bytes);

    lid::testing::WriteBytes(dir / "cut.lidm", bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(LoadCheckpoint((dir / "cut.lidm").string()), DataError);
  }
  CHECK_THROWS_AS(LoadCheckpoint((dir / "none.lidm").string()), DataError);
  lid::testing::WriteBytes(dir / "magic.lidm", "LIDX\x01");
  CHECK_THROWS_AS(LoadCheckpoint((dir / "magic.lidm").string()), DataError);
}

TEST_CASE("representation dump") {
  lid::testing::TempDir dir;
  const Tensor r = RandomTensor({5, 7}, 16);
  WriteRepresentations(r, (dir / "r.lidr").string());
  const std::string bytes = lid::testing::ReadBytes(dir / "r.lidr");
  CHECK(bytes.size() == 4 + 4 + 4 + 5 * 7 * 4);
  CHECK(bytes.substr(0, 4) == "LIDR");
  const Tensor back = ReadRepresentations((dir / "r.lidr").string());
  CHECK(back.shape() == r.shape());
  CHECK((back.values() - r.values().cast<float>().cast<double>()).cwiseAbs().maxCoeff() == 0.0);
}

}  // TEST_SUITE
