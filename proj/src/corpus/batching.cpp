// src/corpus/batching.cpp

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
#include <map>

#include "lid/corpus.hpp"

namespace lid::corpus {

Tensor MakeBatchTensor(std::span<const RowMatrixXd> features, std::span<const std::size_t> indices) {
  if (indices.empty()) throw DimensionError("batch: no items");
  const auto& first = features[indices[0]];
  const Index steps = first.rows();
  const Index dim = first.cols();
  Tensor batch({static_cast<Index>(indices.size()), dim, steps});
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const auto& f = features[indices[b]];
    if (f.rows() != steps || f.cols() != dim) {
      throw DimensionError("batch: items have different shapes (" + std::to_string(f.rows()) + "x" +
                           std::to_string(f.cols()) + " vs " + std::to_string(steps) + "x" +
                           std::to_string(dim) + ")");
    }
    batch.Sample(static_cast<Index>(b)) = f.transpose();
  }
  return batch;
}

std::vector<std::vector<std::size_t>> MakeBatches(std::span<const int> labels, std::size_t batch_size,
                                                  Rng& rng, bool balanced) {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  std::vector<std::size_t> order;
  order.reserve(labels.size());
  if (!balanced) {
    for (std::size_t i = 0; i < labels.size(); ++i) order.push_back(i);
    rng.Shuffle(std::span<std::size_t>(order));
  } else {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    std::vector<std::vector<std::size_t>> queues;
    for (auto& [label, items] : by_class) {
      rng.Shuffle(std::span<std::size_t>(items));
      queues.push_back(std::move(items));
    }
    rng.Shuffle(std::span<std::vector<std::size_t>>(queues));
    for (std::size_t round = 0; order.size() < labels.size(); ++round) {
      for (const auto& q : queues) {
        if (round < q.size()) order.push_back(q[round]);
      }
    }
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

namespace {

void NoteKind(std::optional<frontend::FeatureKind>& kind, frontend::FeatureKind k, const std::string& path) {
  if (kind && *kind != k) throw DataError(path + ": feature kind differs from the rest of the selection");
  kind = k;
}

}  // namespace

FeatureDataset LoadFeatureDataset(const Manifest& manifest, Split split, std::string_view domain,
                                  const LabelSet& labels) {
  FeatureDataset ds;
  for (const auto& r : manifest.Select(split, domain)) {
    const int label = labels.IndexOf(r.language);
    const auto path = manifest.Resolve(r).string();
    auto f = frontend::ReadFeatures(path);
    NoteKind(ds.kind, f.kind, path);
    ds.features.push_back(std::move(f.frames));
    ds.labels.push_back(label);
  }
  return ds;
}

UnlabeledFeatures LoadUnlabeledFeatures(const Manifest& manifest, Split split, std::string_view domain) {
  UnlabeledFeatures ds;
  for (const auto& r : manifest.Select(split, domain)) {
    const auto path = manifest.Resolve(r).string();
    auto f = frontend::ReadFeatures(path);
    NoteKind(ds.kind, f.kind, path);
    ds.features.push_back(std::move(f.frames));
  }
  return ds;
}

}  // namespace lid::corpus
