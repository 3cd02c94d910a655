// src/eval/evaluation.cpp

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

#include "lid/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace lid::eval {

namespace {

template <typename Fn>
void ForEachBatch(std::size_t n, std::size_t batch_size, Fn&& fn) {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    fn(start, std::span<const std::size_t>(idx));
  }
}

template <typename Pick>
Tensor CollectRows(const model::LidModel& model, std::span<const RowMatrixXd> features,
                   std::size_t batch_size, Pick&& pick) {
  Tensor out;
  ForEachBatch(features.size(), batch_size, [&](std::size_t start, std::span<const std::size_t> idx) {
    const auto acts = model.Infer(corpus::MakeBatchTensor(features, idx));
    const Tensor& rows = pick(acts);
    if (out.empty()) out = Tensor({static_cast<Index>(features.size()), rows.dim(1)});
    out.Matrix().middleRows(static_cast<Index>(start), rows.dim(0)) = rows.Matrix();
  });
  return out;
}

}  // namespace

std::vector<int> PredictAll(const model::LidModel& model, std::span<const RowMatrixXd> features,
                            std::size_t batch_size) {
  std::vector<int> out;
  out.reserve(features.size());
  ForEachBatch(features.size(), batch_size, [&](std::size_t, std::span<const std::size_t> idx) {
    const auto pred = model.Predict(corpus::MakeBatchTensor(features, idx));
    out.insert(out.end(), pred.begin(), pred.end());
  });
  return out;
}

Tensor HiddenRepresentations(const model::LidModel& model, std::span<const RowMatrixXd> features,
                             std::size_t batch_size) {
  return CollectRows(model, features, batch_size,
                     [](const model::Activations& a) -> const Tensor& { return a.last_hidden(); });
}

Tensor ConvRepresentations(const model::LidModel& model, std::span<const RowMatrixXd> features,
                           std::size_t batch_size) {
  return CollectRows(model, features, batch_size,
                     [](const model::Activations& a) -> const Tensor& { return a.representation(); });
}

EvalReport Evaluate(const model::LidModel& model, const corpus::FeatureDataset& data,
                    const corpus::LabelSet& labels, std::size_t batch_size) {
  if (model.architecture().num_languages != labels.size()) {
    throw DataError("model predicts " + std::to_string(model.architecture().num_languages) +
                    " languages, label set has " + std::to_string(labels.size()));
  }
  const auto predicted = PredictAll(model, data.features, batch_size);
  EvalReport r;
  r.variant = model.variant();
  r.languages = labels.names();
  r.confusion = ConfusionMatrix::FromPairs(data.labels, predicted, labels.size());
  r.accuracy = Accuracy(r.confusion);
  r.balanced_accuracy = BalancedAccuracy(r.confusion);
  r.f1 = F1PerClass(r.confusion);
  return r;
}

std::vector<EvalReport> CrossDomainEval(std::span<const TrainedModel> models, std::span<const EvalSet> sets,
                                        const corpus::LabelSet& labels, std::size_t batch_size) {
  for (const auto& s : sets) {
    if (s.data == nullptr || s.data->size() == 0) throw DataError("no evaluation data for domain " + s.domain);
    if (s.data->kind && *s.data->kind != s.kind) {
      throw DataError("evaluation set for domain " + s.domain + " holds " +
                      std::string(frontend::FeatureKindName(*s.data->kind)) + " features, declared " +
                      std::string(frontend::FeatureKindName(s.kind)));
    }
  }
  std::vector<EvalReport> out;
  for (const auto& m : models) {
    const EvalSet* home = nullptr;
    std::vector<const EvalSet*> away;
    for (const auto& s : sets) {
      if (s.kind != m.kind) continue;
      if (s.domain == m.train_domain) {
        home = &s;
      } else {
        away.push_back(&s);
      }
    }
    if (home == nullptr) {
      throw DataError("no " + std::string(frontend::FeatureKindName(m.kind)) +
                      " evaluation set for training domain " + m.train_domain +
                      " (checkpoint/feature-kind mismatch?)");
    }
    if (m.model->variant() != m.variant) {
      throw DataError("checkpoint variant " + std::string(model::VariantName(m.model->variant())) +
                      " does not match declared " + std::string(model::VariantName(m.variant)));
    }
    auto fill = [&](const EvalSet& s) {
      EvalReport r = Evaluate(*m.model, *s.data, labels, batch_size);
      r.train_domain = m.train_domain;
      r.eval_domain = s.domain;
      r.kind = m.kind;
      return r;
    };
    EvalReport in = fill(*home);
    const double base = in.balanced_accuracy;
    out.push_back(std::move(in));
    for (const EvalSet* s : away) {
      EvalReport r = fill(*s);
      r.delta = r.balanced_accuracy - base;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::string ReportsToJson(std::span<const EvalReport> reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["train_domain"] = r.train_domain;
    j["eval_domain"] = r.eval_domain;
    j["features"] = std::string(frontend::FeatureKindName(r.kind));
    j["variant"] = std::string(model::VariantName(r.variant));
    j["accuracy"] = r.accuracy;
    j["balanced_accuracy"] = r.balanced_accuracy;
    j["delta"] = r.delta;
    nlohmann::ordered_json f1;
    for (std::size_t k = 0; k < r.languages.size(); ++k) f1[r.languages[k]] = r.f1[static_cast<Index>(k)];
    j["f1"] = f1;
    j["languages"] = r.languages;
    nlohmann::ordered_json cm = nlohmann::ordered_json::array();
    for (int i = 0; i < r.confusion.num_classes(); ++i) {
      std::vector<std::int64_t> row;
      for (int k = 0; k < r.confusion.num_classes(); ++k) row.push_back(r.confusion(i, k));
      cm.push_back(row);
    }
    j["confusion"] = cm;
    arr.push_back(std::move(j));
  }
  nlohmann::ordered_json root;
  root["reports"] = arr;
  return root.dump(2) + "\n";
}

std::string FormatTable(std::span<const EvalReport> reports) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %-8s %-8s %-12s %10s %10s %9s\n", "train", "features", "variant",
                "eval", "in-domain", "OOD", "delta");
  os << line;
  const EvalReport* home = nullptr;
  for (const auto& r : reports) {
    if (r.in_domain()) {
      home = &r;
      continue;
    }
    if (home == nullptr) continue;
    std::snprintf(line, sizeof(line), "%-12s %-8s %-8s %-12s %10.2f %10.2f %+9.2f\n", r.train_domain.c_str(),
                  std::string(frontend::FeatureKindName(r.kind)).c_str(),
                  std::string(model::VariantName(r.variant)).c_str(), r.eval_domain.c_str(),
                  100.0 * home->balanced_accuracy, 100.0 * r.balanced_accuracy, 100.0 * r.delta);
    os << line;
  }
  return os.str();
}

std::string FormatF1Table(std::span<const EvalReport> reports) {
  std::ostringstream os;
  char cell[64];
  for (const auto& r : reports) {
    os << r.train_domain << " -> " << r.eval_domain << " (" << frontend::FeatureKindName(r.kind) << ", "
       << model::VariantName(r.variant) << ") F1 %:";
    for (std::size_t k = 0; k < r.languages.size(); ++k) {
      std::snprintf(cell, sizeof(cell), " %s=%.1f", r.languages[k].c_str(), 100.0 * r.f1[static_cast<Index>(k)]);
      os << cell;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace lid::eval
