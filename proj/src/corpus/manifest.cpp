// src/corpus/manifest.cpp

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
#include <set>
#include <sstream>

#include "lid/corpus.hpp"

namespace lid::corpus {

std::string_view SplitName(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kValid:
      return "valid";
    case Split::kEval:
      return "eval";
  }
  return "?";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "valid") return Split::kValid;
  if (name == "eval") return Split::kEval;
  throw DataError("unknown split '" + std::string(name) + "' (expected train, valid, eval)");
}

namespace {

constexpr std::string_view kHeader = "path\tlanguage\tdomain\tsplit";

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

}  // namespace

Manifest ReadManifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("manifest not found: " + path.string());
  Manifest m;
  m.base_dir = path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kHeader) {
        throw DataError(path.string() + ":1: expected header \"path<TAB>language<TAB>domain<TAB>split\"");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto fields = SplitTabs(line);
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    if (fields.size() != 4) {
      throw DataError(where + "expected 4 tab-separated fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw DataError(where + "empty path");
    if (fields[2].empty()) throw DataError(where + "empty domain");
    if (!seen.insert(fields[0]).second) throw DataError(where + "duplicate path " + fields[0]);
    ManifestRecord r;
    r.path = fields[0];
    r.language = fields[1];
    r.domain = fields[2];
    try {
      r.split = ParseSplit(fields[3]);
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
    m.records.push_back(std::move(r));
  }
  if (line_no == 0) throw DataError(path.string() + ": empty manifest (missing header)");
  return m;
}

void WriteManifest(const Manifest& manifest, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write manifest " + path.string());
  os << kHeader << '\n';
  for (const auto& r : manifest.records) {
    os << r.path << '\t' << r.language << '\t' << r.domain << '\t' << SplitName(r.split) << '\n';
  }
  if (!os) throw DataError("error while writing manifest " + path.string());
}

std::vector<ManifestRecord> Manifest::Select(Split split, std::optional<std::string_view> domain) const {
  std::vector<ManifestRecord> out;
  for (const auto& r : records) {
    if (r.split == split && (!domain || r.domain == *domain)) out.push_back(r);
  }
  return out;
}

std::map<std::tuple<std::string, std::string, Split>, std::size_t> Manifest::Counts() const {
  std::map<std::tuple<std::string, std::string, Split>, std::size_t> counts;
  for (const auto& r : records) ++counts[{r.language, r.domain, r.split}];
  return counts;
}

LabelSet::LabelSet(std::vector<std::string> names) : names_(std::move(names)) {
  std::set<std::string> unique(names_.begin(), names_.end());
  if (unique.size() != names_.size()) throw ConfigError("language list has duplicates");
  if (names_.empty()) throw ConfigError("language list is empty");
}

int LabelSet::IndexOf(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw DataError("unknown language label '" + std::string(name) + "'");
  return static_cast<int>(it - names_.begin());
}

SegmentStream::SegmentStream(const Manifest& manifest, Split split, std::optional<std::string> domain,
                             LabelSet labels)
    : manifest_(&manifest),
      records_(manifest.Select(split, domain ? std::optional<std::string_view>(*domain) : std::nullopt)),
      labels_(std::move(labels)) {}

bool SegmentStream::Next(LabeledSegment& out) {
  while (pending_pos_ >= pending_.size()) {
    if (next_record_ >= records_.size()) return false;
    const auto& r = records_[next_record_];
    pending_label_ = labels_.IndexOf(r.language);
    const auto file = manifest_->Resolve(r);
    if (!std::filesystem::exists(file)) throw DataError("audio file not found: " + file.string());
    const auto wav = frontend::ReadWav(file.string());
    pending_ = frontend::Segment(wav.samples, wav.sample_rate).segments;
    pending_pos_ = 0;
    pending_record_ = next_record_;
    ++next_record_;
  }
  const auto& r = records_[pending_record_];
  out.audio.samples = std::move(pending_[pending_pos_++]);
  out.audio.sample_rate = frontend::kSampleRate;
  out.audio.language = r.language;
  out.audio.domain = r.domain;
  out.language = pending_label_;
  out.record = pending_record_;
  return true;
}

}  // namespace lid::corpus
