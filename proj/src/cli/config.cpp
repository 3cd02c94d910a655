// src/cli/config.cpp

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

#include "lid/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace lid::cli {

namespace fs = std::filesystem;

namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T ParseNumber(const std::string& s) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError("not a valid number: '" + s + "'");
  return v;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string JoinList(const std::vector<T>& items, auto&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + std::string(fmt(items[i]));
  return out;
}

// Text codecs for each value type a key can hold.
template <typename T>
struct Codec;

template <>
struct Codec<int> {
  static int Parse(const std::string& s) { return ParseNumber<int>(s); }
  static std::string Format(int v) { return std::to_string(v); }
};
template <>
struct Codec<long> {
  static long Parse(const std::string& s) { return ParseNumber<long>(s); }
  static std::string Format(long v) { return std::to_string(v); }
};
template <>
struct Codec<std::size_t> {
  static std::size_t Parse(const std::string& s) { return ParseNumber<std::size_t>(s); }
  static std::string Format(std::size_t v) { return std::to_string(v); }
};
template <>
struct Codec<double> {
  static double Parse(const std::string& s) { return ParseNumber<double>(s); }
  static std::string Format(double v) { return FormatDouble(v); }
};
template <>
struct Codec<bool> {
  static bool Parse(const std::string& s) {
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw ConfigError("not a boolean: '" + s + "'");
  }
  static std::string Format(bool v) { return v ? "true" : "false"; }
};
template <>
struct Codec<std::string> {
  static std::string Parse(const std::string& s) { return s; }
  static std::string Format(const std::string& v) { return v; }
};
template <>
struct Codec<fs::path> {
  static fs::path Parse(const std::string& s) { return fs::path(s); }
  static std::string Format(const fs::path& v) { return v.generic_string(); }
};
template <>
struct Codec<frontend::FeatureKind> {
  static frontend::FeatureKind Parse(const std::string& s) {
    try {
      return frontend::ParseFeatureKind(s);
    } catch (const Error&) {
      throw ConfigError("unknown feature kind '" + s + "' (expected mfsc or mfcc)");
    }
  }
  static std::string Format(frontend::FeatureKind v) { return std::string(frontend::FeatureKindName(v)); }
};
template <>
struct Codec<model::Variant> {
  static model::Variant Parse(const std::string& s) {
    try {
      return model::ParseVariant(s);
    } catch (const Error&) {
      throw ConfigError("unknown variant '" + s + "' (expected none, da1 or da2)");
    }
  }
  static std::string Format(model::Variant v) { return std::string(model::VariantName(v)); }
};
template <>
struct Codec<corpus::Split> {
  static corpus::Split Parse(const std::string& s) {
    try {
      return corpus::ParseSplit(s);
    } catch (const Error&) {
      throw ConfigError("unknown split '" + s + "' (expected train, valid or eval)");
    }
  }
  static std::string Format(corpus::Split v) { return std::string(corpus::SplitName(v)); }
};
template <typename T>
struct Codec<std::vector<T>> {
  static std::vector<T> Parse(const std::string& s) {
    std::vector<T> out;
    for (const auto& item : SplitList(s)) out.push_back(Codec<T>::Parse(item));
    return out;
  }
  static std::string Format(const std::vector<T>& v) {
    return JoinList(v, [](const T& x) { return Codec<T>::Format(x); });
  }
};
template <>
struct Codec<std::array<Index, 3>> {
  static std::array<Index, 3> Parse(const std::string& s) {
    const auto items = SplitList(s);
    if (items.size() != 3) throw ConfigError("expected three comma-separated integers, got '" + s + "'");
    return {ParseNumber<Index>(items[0]), ParseNumber<Index>(items[1]), ParseNumber<Index>(items[2])};
  }
  static std::string Format(const std::array<Index, 3>& v) {
    return std::to_string(v[0]) + ", " + std::to_string(v[1]) + ", " + std::to_string(v[2]);
  }
};
template <>
struct Codec<std::optional<double>> {
  static std::optional<double> Parse(const std::string& s) {
    if (s.empty() || s == "none") return std::nullopt;
    return ParseNumber<double>(s);
  }
  static std::string Format(const std::optional<double>& v) { return v ? FormatDouble(*v) : "none"; }
};

struct Field {
  std::string section;
  std::string key;
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

template <typename Access>
Field MakeField(std::string section, std::string key, Access access) {
  using T = std::remove_cvref_t<decltype(access(std::declval<Config&>()))>;
  return {std::move(section), std::move(key),
          [access](Config& c, const std::string& text) { access(c) = Codec<T>::Parse(text); },
          [access](const Config& c) { return Codec<T>::Format(access(const_cast<Config&>(c))); }};
}

#define LID_FIELD(section, key, expr) MakeField(section, key, [](Config& c) -> auto& { return expr; })

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      LID_FIELD("data", "seed", c.data.seed),
      LID_FIELD("data", "name", c.data.name),
      LID_FIELD("data", "run_root", c.data.run_root),
      LID_FIELD("data", "manifest", c.data.manifest),
      LID_FIELD("data", "num_languages", c.synth.num_languages),
      LID_FIELD("data", "train_per_language", c.synth.train_per_language),
      LID_FIELD("data", "valid_per_language", c.synth.valid_per_language),
      LID_FIELD("data", "eval_per_language", c.synth.eval_per_language),
      LID_FIELD("data", "vowel_pool", c.synth.vowel_pool),
      LID_FIELD("data", "fricative_pool", c.synth.fricative_pool),
      LID_FIELD("data", "vowels_per_language", c.synth.vowels_per_language),
      LID_FIELD("data", "fricatives_per_language", c.synth.fricatives_per_language),
      LID_FIELD("data", "transition_concentration", c.synth.transition_concentration),
      LID_FIELD("data", "utterance_seconds", c.synth.utterance_seconds),
      LID_FIELD("data", "source_domain", c.synth.source.name),
      LID_FIELD("data", "source_dither_snr_db", c.synth.source.dither_snr_db),
      LID_FIELD("data", "target_domain", c.synth.target.name),
      LID_FIELD("data", "target_snr_min_db", c.synth.target.snr_min_db),
      LID_FIELD("data", "target_snr_max_db", c.synth.target.snr_max_db),
      LID_FIELD("data", "target_band_low_hz", c.synth.target.band_low_hz),
      LID_FIELD("data", "target_band_high_hz", c.synth.target.band_high_hz),
      LID_FIELD("data", "target_gain_min_db", c.synth.target.gain_min_db),
      LID_FIELD("data", "target_gain_max_db", c.synth.target.gain_max_db),
      LID_FIELD("data", "target_noise_tilt", c.synth.target.noise_tilt),

      LID_FIELD("features", "kinds", c.feature_kinds),

      LID_FIELD("model", "filters", c.architecture.filters),
      LID_FIELD("model", "widths", c.architecture.widths),
      LID_FIELD("model", "hidden", c.architecture.hidden),
      LID_FIELD("model", "domain_hidden", c.architecture.domain_hidden),

      LID_FIELD("train", "kind", c.train.kind),
      LID_FIELD("train", "variant", c.train.variant),
      LID_FIELD("train", "source", c.train.source),
      LID_FIELD("train", "target", c.train.target),
      LID_FIELD("train", "epochs", c.train.train.epochs),
      LID_FIELD("train", "batch_size", c.train.train.batch_size),
      LID_FIELD("train", "lr", c.train.train.lr),
      LID_FIELD("train", "lambda_gamma", c.train.train.lambda_gamma),
      LID_FIELD("train", "fixed_lambda", c.train.train.fixed_lambda),
      LID_FIELD("train", "balanced_batches", c.train.train.balanced_batches),
      LID_FIELD("train", "keep_best", c.train.train.keep_best),
      LID_FIELD("train", "checkpoint_every", c.train.train.checkpoint_every),
      LID_FIELD("train", "eval_batch_size", c.train.train.eval_batch_size),

      LID_FIELD("eval", "kinds", c.eval.kinds),
      LID_FIELD("eval", "variants", c.eval.variants),
      LID_FIELD("eval", "sources", c.eval.sources),
      LID_FIELD("eval", "domains", c.eval.domains),
      LID_FIELD("eval", "split", c.eval.split),
      LID_FIELD("eval", "batch_size", c.eval.batch_size),

      LID_FIELD("viz", "kind", c.viz.kind),
      LID_FIELD("viz", "variant", c.viz.variant),
      LID_FIELD("viz", "source", c.viz.source),
      LID_FIELD("viz", "domains", c.viz.domains),
      LID_FIELD("viz", "split", c.viz.split),
      LID_FIELD("viz", "samples_per_domain", c.viz.projection.samples_per_domain),
      LID_FIELD("viz", "perplexity", c.viz.projection.perplexity),
      LID_FIELD("viz", "iterations", c.viz.projection.iterations),
      LID_FIELD("viz", "learning_rate", c.viz.projection.learning_rate),
      LID_FIELD("viz", "exaggeration", c.viz.projection.exaggeration),
      LID_FIELD("viz", "exaggeration_iterations", c.viz.projection.exaggeration_iterations),
      LID_FIELD("viz", "initial_momentum", c.viz.projection.initial_momentum),
      LID_FIELD("viz", "final_momentum", c.viz.projection.final_momentum),
      LID_FIELD("viz", "momentum_switch", c.viz.projection.momentum_switch),
  };
  return fields;
}

#undef LID_FIELD

void Require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config: " + what);
}

void Validate(const Config& c) {
  Require(!c.data.name.empty(), "[data] name must not be empty");
  Require(c.data.name.find('/') == std::string::npos, "[data] name must not contain '/'");
  const auto& s = c.synth;
  Require(s.num_languages >= 1, "[data] num_languages must be positive");
  Require(s.train_per_language >= 0 && s.valid_per_language >= 0 && s.eval_per_language >= 0,
          "[data] per-language counts must be non-negative");
  Require(s.vowel_pool >= 1 && s.fricative_pool >= 1, "[data] phone pools must be positive");
  Require(s.vowels_per_language >= 1 && s.vowels_per_language <= s.vowel_pool,
          "[data] vowels_per_language must be in [1, vowel_pool]");
  Require(s.fricatives_per_language >= 0 && s.fricatives_per_language <= s.fricative_pool,
          "[data] fricatives_per_language must be in [0, fricative_pool]");
  Require(s.transition_concentration > 0.0, "[data] transition_concentration must be positive");
  Require(s.utterance_seconds * frontend::kSampleRate >= frontend::kSegmentSamples,
          "[data] utterance_seconds must be at least 3");
  Require(!s.source.name.empty() && !s.target.name.empty() && s.source.name != s.target.name,
          "[data] source_domain and target_domain must be distinct non-empty names");
  Require(s.target.snr_min_db <= s.target.snr_max_db, "[data] target_snr_min_db exceeds target_snr_max_db");
  Require(s.target.gain_min_db <= s.target.gain_max_db, "[data] target_gain_min_db exceeds target_gain_max_db");
  Require(s.target.band_low_hz > 0.0 && s.target.band_low_hz < s.target.band_high_hz &&
              s.target.band_high_hz < frontend::kSampleRate / 2.0,
          "[data] target band edges must satisfy 0 < low < high < 8000");
  Require(s.target.noise_tilt >= 0.0 && s.target.noise_tilt < 1.0, "[data] target_noise_tilt must be in [0, 1)");

  Require(!c.feature_kinds.empty(), "[features] kinds must not be empty");

  const auto& a = c.architecture;
  for (int i = 0; i < 3; ++i) {
    Require(a.filters[static_cast<std::size_t>(i)] > 0 && a.widths[static_cast<std::size_t>(i)] > 0,
            "[model] filters and widths must be positive");
  }
  Require(a.MinInputLength() <= frontend::NumFrames(frontend::kSegmentSamples),
          "[model] receptive field is longer than a 3-second segment");
  Require(a.hidden > 0 && a.domain_hidden > 0, "[model] hidden sizes must be positive");

  const auto& t = c.train;
  Require(t.source != t.target, "[train] source and target must differ");
  Require(t.train.epochs > 0, "[train] epochs must be positive");
  Require(t.train.batch_size > 0, "[train] batch_size must be positive");
  Require(t.train.variant == model::Variant::kNone || t.train.batch_size >= 2,
          "[train] batch_size must be at least 2 for adaptation");
  Require(t.train.lr >= 0.0, "[train] lr must be non-negative");
  Require(t.train.lambda_gamma > 0.0, "[train] lambda_gamma must be positive");
  Require(!t.train.fixed_lambda || *t.train.fixed_lambda >= 0.0, "[train] fixed_lambda must be non-negative");
  Require(t.train.checkpoint_every >= 0, "[train] checkpoint_every must be non-negative");
  Require(t.train.eval_batch_size > 0, "[train] eval_batch_size must be positive");

  Require(!c.eval.kinds.empty() && !c.eval.variants.empty() && !c.eval.sources.empty() && !c.eval.domains.empty(),
          "[eval] kinds, variants, sources and domains must not be empty");
  Require(c.eval.batch_size > 0, "[eval] batch_size must be positive");

  const auto& p = c.viz.projection;
  Require(!c.viz.domains.empty(), "[viz] domains must not be empty");
  Require(p.samples_per_domain > 0, "[viz] samples_per_domain must be positive");
  Require(p.perplexity > 0.0, "[viz] perplexity must be positive");
  Require(p.iterations >= 0 && p.exaggeration_iterations >= 0 && p.momentum_switch >= 0,
          "[viz] iteration counts must be non-negative");
  Require(p.learning_rate > 0.0 && p.exaggeration >= 1.0, "[viz] learning_rate must be positive, exaggeration >= 1");
}

}  // namespace

fs::path Config::CorpusManifest() const {
  return data.manifest.empty() ? RunDir() / "corpus" / "manifest.tsv" : data.manifest;
}

fs::path Config::FeatureManifest(frontend::FeatureKind kind) const {
  return RunDir() / "features" / std::string(frontend::FeatureKindName(kind)) / "manifest.tsv";
}

fs::path Config::CheckpointPath(frontend::FeatureKind kind, model::Variant variant, const std::string& source) const {
  return RunDir() / "checkpoints" /
         (std::string(frontend::FeatureKindName(kind)) + "-" + std::string(model::VariantName(variant)) + "-" +
          source + ".lidm");
}

void Config::SetSeed(std::uint64_t seed) {
  data.seed = seed;
  synth.seed = seed;
  train.train.seed = seed;
  viz.projection.seed = seed;
}

Config ParseConfig(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  std::map<std::string, std::set<std::string>> known;
  for (const auto& f : Fields()) known[f.section].insert(f.key);

  Config c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' outside any section");
    const auto it = known.find(section);
    if (it == known.end()) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
    }
  }
  for (const auto& f : Fields()) {
    const auto value = tree.get_optional<std::string>(pt::ptree::path_type(f.section + "/" + f.key, '/'));
    if (!value) continue;
    try {
      f.set(c, Trim(*value));
    } catch (const ConfigError& e) {
      throw ConfigError("config: [" + f.section + "] " + f.key + ": " + e.what());
    }
  }
  c.SetSeed(c.data.seed);
  Validate(c);
  return c;
}

Config LoadConfig(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

std::string ToIni(const Config& config) {
  std::string out;
  std::string section;
  for (const auto& f : Fields()) {
    if (f.section != section) {
      out += (section.empty() ? "[" : "\n[") + f.section + "]\n";
      section = f.section;
    }
    out += f.key + " = " + f.get(config) + "\n";
  }
  return out;
}

}  // namespace lid::cli
