// include/lid/corpus.hpp

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

#ifndef LID_CORPUS_HPP_
#define LID_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "lid/audio.hpp"
#include "lid/features.hpp"
#include "lid/rng.hpp"
#include "lid/tensor.hpp"

namespace lid::corpus {

enum class Split : std::uint8_t { kTrain, kValid, kEval };

std::string_view SplitName(Split s);
Split ParseSplit(std::string_view name);

struct ManifestRecord {
  std::string path;  // relative to the manifest's directory
  std::string language;
  std::string domain;
  Split split = Split::kTrain;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

/// UTF-8 TSV with header "path\tlanguage\tdomain\tsplit".
struct Manifest {
  std::vector<ManifestRecord> records;
  std::filesystem::path base_dir;  // paths resolve against this

  std::filesystem::path Resolve(const ManifestRecord& r) const { return base_dir / r.path; }

  /// Records matching the split and, if given, the domain; manifest order.
  std::vector<ManifestRecord> Select(Split split, std::optional<std::string_view> domain = {}) const;

  /// Count of records per (language, domain, split).
  std::map<std::tuple<std::string, std::string, Split>, std::size_t> Counts() const;
};

/// Parses a manifest file. Wrong field counts, a bad header, unknown split
/// names and duplicate paths throw DataError with the line number.
Manifest ReadManifest(const std::filesystem::path& path);

void WriteManifest(const Manifest& manifest, const std::filesystem::path& path);

/// Maps language names to class indices in a fixed order.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::vector<std::string> names);

  /// Throws DataError for a name outside the set.
  int IndexOf(std::string_view name) const;
  const std::string& Name(int index) const { return names_.at(static_cast<std::size_t>(index)); }
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

/// An audio segment with its class indices attached.
struct LabeledSegment {
  frontend::AudioSegment audio;
  int language = -1;
  std::size_t record = 0;  // index into the selected records
};

/// Lazily reads and segments the audio of a record selection, in manifest
/// order. Missing files throw DataError naming the path; unknown languages
/// throw DataError.
class SegmentStream {
 public:
  SegmentStream(const Manifest& manifest, Split split, std::optional<std::string> domain,
                LabelSet labels);

  /// Fills `out` with the next segment; false at the end.
  bool Next(LabeledSegment& out);

  const std::vector<ManifestRecord>& records() const { return records_; }

 private:
  const Manifest* manifest_;
  std::vector<ManifestRecord> records_;
  LabelSet labels_;
  std::size_t next_record_ = 0;
  std::vector<Eigen::VectorXd> pending_;
  std::size_t pending_pos_ = 0;
  int pending_label_ = -1;
  std::size_t pending_record_ = 0;
};

// ---------------------------------------------------------------------------
// In-memory feature datasets.

/// Fixed-length feature sequences with language labels. Target-domain data
/// used for adaptation is an UnlabeledFeatures, which has no label field.
struct FeatureDataset {
  std::vector<RowMatrixXd> features;  // each [T, 13]
  std::vector<int> labels;
  std::optional<frontend::FeatureKind> kind;  // unset when empty

  std::size_t size() const { return features.size(); }
};

struct UnlabeledFeatures {
  std::vector<RowMatrixXd> features;
  std::optional<frontend::FeatureKind> kind;

  std::size_t size() const { return features.size(); }
};

/// Stacks rows of `features` selected by `indices` into [B, dim, T].
Tensor MakeBatchTensor(std::span<const RowMatrixXd> features, std::span<const std::size_t> indices);

/// Seeded batch order for one epoch. Without balancing, a shuffled
/// permutation cut into consecutive batches. With balancing, languages are
/// interleaved round-robin (each language's items shuffled, language order
/// shuffled once) so per-batch language counts differ by at most one while
/// every language still has items. The final partial batch is kept.
std::vector<std::vector<std::size_t>> MakeBatches(std::span<const int> labels, std::size_t batch_size,
                                                  Rng& rng, bool balanced);

/// Loads every feature file referenced by a feature manifest selection.
/// Throws DataError if the files mix feature kinds.
FeatureDataset LoadFeatureDataset(const Manifest& manifest, Split split, std::string_view domain,
                                  const LabelSet& labels);

/// Same, with language labels never read.
UnlabeledFeatures LoadUnlabeledFeatures(const Manifest& manifest, Split split, std::string_view domain);

}  // namespace lid::corpus

#endif  // LID_CORPUS_HPP_
