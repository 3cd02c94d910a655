// include/lid/synth.hpp

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

#ifndef LID_SYNTH_HPP_
#define LID_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lid/corpus.hpp"
#include "lid/rng.hpp"

namespace lid::corpus {

/// Seeded stand-in for a two-domain multi-language speech corpus.
///
/// A "language" is a pseudo-phone inventory (vowel-like resonance sets,
/// fricative-like noise bands, silence) plus a first-order transition matrix
/// over it and a language-wide high-frequency timbre resonance. Utterances
/// are rendered by a small source-filter synthesizer and then passed through
/// a domain channel. Language parameters never depend on the domain, and the
/// channel never depends on the language.

struct Resonance {
  double freq_hz = 0.0;
  double bandwidth_hz = 0.0;
};

enum class PhoneKind : std::uint8_t { kVowel, kFricative, kSilence };

struct PseudoPhone {
  PhoneKind kind = PhoneKind::kSilence;
  std::vector<Resonance> resonances;
  double mean_duration_s = 0.08;
};

struct SynthLanguage {
  std::string name;
  std::vector<PseudoPhone> phones;
  Eigen::MatrixXd transitions;  // rows sum to 1
  Eigen::VectorXd initial;      // sums to 1
  Resonance timbre;             // applied to every voiced phone
};

/// Domain-defining channel. A clean channel only adds a faint white dither.
struct DomainChannel {
  std::string name = "clean";
  bool clean = true;
  double dither_snr_db = 50.0;
  double snr_min_db = 5.0;
  double snr_max_db = 20.0;
  double band_low_hz = 300.0;
  double band_high_hz = 3400.0;
  double gain_min_db = -12.0;
  double gain_max_db = 0.0;
  double noise_tilt = 0.8;  // one-pole coefficient coloring the noise

  static DomainChannel Clean();
  static DomainChannel Noisy();
};

struct SynthSpec {
  int num_languages = 6;
  int train_per_language = 600;
  int valid_per_language = 100;
  int eval_per_language = 150;
  std::uint64_t seed = 0;

  int vowel_pool = 14;
  int fricative_pool = 8;
  int vowels_per_language = 6;
  int fricatives_per_language = 3;
  /// Dirichlet concentration of the transition rows; smaller values give
  /// peakier, more language-specific phonotactics.
  double transition_concentration = 0.3;
  double utterance_seconds = 3.0;

  DomainChannel source = DomainChannel::Clean();
  DomainChannel target = DomainChannel::Noisy();

  std::vector<std::string> LanguageNames() const;
};

/// Language definitions; a function of the seed and language parameters only.
std::vector<SynthLanguage> BuildLanguages(const SynthSpec& spec);

/// One utterance's underlying content: phone sequence, per-phone durations
/// in samples, and speaker traits.
struct UtteranceScript {
  std::vector<int> phones;
  std::vector<Eigen::Index> durations;
  double f0_hz = 120.0;
  double tract_scale = 1.0;
};

UtteranceScript SampleScript(const SynthLanguage& language, Eigen::Index num_samples, Rng& rng);

/// Clean rendering of a script at 16 kHz, normalized to a fixed RMS.
Eigen::VectorXd RenderSpeech(const SynthLanguage& language, const UtteranceScript& script, Rng& rng);

/// Applies a domain channel to clean speech.
Eigen::VectorXd ApplyChannel(const Eigen::VectorXd& speech, const DomainChannel& channel, Rng& rng);

/// Writes every utterance as a WAV under `out_dir` plus `out_dir/manifest.tsv`
/// and returns the manifest. Output bytes do not depend on `jobs`.
Manifest Generate(const SynthSpec& spec, const std::filesystem::path& out_dir, int jobs = 1);

}  // namespace lid::corpus

#endif  // LID_SYNTH_HPP_
