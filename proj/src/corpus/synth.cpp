// src/corpus/synth.cpp

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

#include "lid/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "lid/audio.hpp"
#include "lid/error.hpp"

namespace lid::corpus {

namespace {

constexpr double kFs = frontend::kSampleRate;
constexpr double kUtteranceRms = 0.05;
constexpr Eigen::Index kFadeSamples = 80;

// Gamma(shape, 1) by Marsaglia-Tsang, with the shape < 1 boost.
double SampleGamma(double shape, Rng& rng) {
  if (shape < 1.0) {
    double u = 0.0;
    while (u <= 0.0) u = rng.Uniform();
    return SampleGamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.Normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.Uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Eigen::VectorXd SampleDirichlet(Eigen::Index n, double concentration, Rng& rng) {
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) p[i] = std::max(SampleGamma(concentration, rng), 1e-300);
  return p / p.sum();
}

// Klatt-style two-pole resonator with unity gain at DC.
class Resonator {
 public:
  Resonator(double freq_hz, double bandwidth_hz) {
    const double r = std::exp(-std::numbers::pi * bandwidth_hz / kFs);
    c_ = -r * r;
    b_ = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq_hz / kFs);
    a_ = 1.0 - b_ - c_;
  }
  double operator()(double x) {
    const double y = a_ * x + b_ * y1_ + c_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a_, b_, c_;
  double y1_ = 0.0, y2_ = 0.0;
};

// RBJ biquad, direct form I.
class Biquad {
 public:
  static Biquad LowPass(double freq_hz, double q) { return Make(freq_hz, q, false); }
  static Biquad HighPass(double freq_hz, double q) { return Make(freq_hz, q, true); }

  double operator()(double x) {
    const double y = b0_ * x + b1_ * x1_ + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
    x2_ = x1_;
    x1_ = x;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  static Biquad Make(double freq_hz, double q, bool high) {
    const double w0 = 2.0 * std::numbers::pi * freq_hz / kFs;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double cw = std::cos(w0);
    const double a0 = 1.0 + alpha;
    Biquad f;
    if (high) {
      f.b0_ = (1.0 + cw) / 2.0 / a0;
      f.b1_ = -(1.0 + cw) / a0;
    } else {
      f.b0_ = (1.0 - cw) / 2.0 / a0;
      f.b1_ = (1.0 - cw) / a0;
    }
    f.b2_ = f.b0_;
    f.a1_ = -2.0 * cw / a0;
    f.a2_ = (1.0 - alpha) / a0;
    return f;
  }

  double b0_ = 1, b1_ = 0, b2_ = 0, a1_ = 0, a2_ = 0;
  double x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
};

double Power(const Eigen::VectorXd& x) { return x.size() ? x.squaredNorm() / static_cast<double>(x.size()) : 0.0; }

void Fade(Eigen::Ref<Eigen::VectorXd> x) {
  const Eigen::Index n = std::min<Eigen::Index>(kFadeSamples, x.size() / 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double g = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    x[i] *= g;
    x[x.size() - 1 - i] *= g;
  }
}

}  // namespace

DomainChannel DomainChannel::Clean() { return DomainChannel{}; }

DomainChannel DomainChannel::Noisy() {
  DomainChannel c;
  c.name = "noisy";
  c.clean = false;
  return c;
}

std::vector<std::string> SynthSpec::LanguageNames() const {
  std::vector<std::string> names;
  for (int l = 0; l < num_languages; ++l) names.push_back("lang" + std::to_string(l));
  return names;
}

std::vector<SynthLanguage> BuildLanguages(const SynthSpec& spec) {
  if (spec.num_languages < 1) throw ConfigError("synth: need at least one language");
  if (spec.vowels_per_language > spec.vowel_pool || spec.fricatives_per_language > spec.fricative_pool) {
    throw ConfigError("synth: per-language inventory larger than the phone pool");
  }
  Rng pool_rng = Rng::Derive(spec.seed, 0x9001);
  std::vector<PseudoPhone> vowels(static_cast<std::size_t>(spec.vowel_pool));
  for (auto& v : vowels) {
    v.kind = PhoneKind::kVowel;
    const double f1 = pool_rng.Uniform(280.0, 850.0);
    const double f2 = pool_rng.Uniform(std::max(f1 + 300.0, 850.0), 2400.0);
    const double f3 = pool_rng.Uniform(std::max(f2 + 200.0, 2300.0), 3300.0);
    v.resonances = {{f1, 60.0 + f1 / 20.0}, {f2, 80.0 + f2 / 25.0}, {f3, 120.0 + f3 / 30.0}};
  }
  std::vector<PseudoPhone> fricatives(static_cast<std::size_t>(spec.fricative_pool));
  for (auto& f : fricatives) {
    f.kind = PhoneKind::kFricative;
    f.resonances = {{pool_rng.Uniform(2500.0, 7200.0), pool_rng.Uniform(700.0, 1500.0)}};
  }

  const auto names = spec.LanguageNames();
  std::vector<SynthLanguage> languages;
  for (int l = 0; l < spec.num_languages; ++l) {
    Rng rng = Rng::Derive(spec.seed, 0x10000 + static_cast<std::uint64_t>(l));
    SynthLanguage lang;
    lang.name = names[static_cast<std::size_t>(l)];

    std::vector<std::size_t> order(vowels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.Shuffle(std::span<std::size_t>(order));
    for (int i = 0; i < spec.vowels_per_language; ++i) {
      PseudoPhone p = vowels[order[static_cast<std::size_t>(i)]];
      p.mean_duration_s = rng.Uniform(0.07, 0.14);
      lang.phones.push_back(std::move(p));
    }
    order.resize(fricatives.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.Shuffle(std::span<std::size_t>(order));
    for (int i = 0; i < spec.fricatives_per_language; ++i) {
      PseudoPhone p = fricatives[order[static_cast<std::size_t>(i)]];
      p.mean_duration_s = rng.Uniform(0.05, 0.11);
      lang.phones.push_back(std::move(p));
    }
    PseudoPhone silence;
    silence.mean_duration_s = 0.08;
    lang.phones.push_back(silence);

    const double slot = 3000.0 / spec.num_languages;
    lang.timbre = {4000.0 + slot * (l + rng.Uniform(0.25, 0.75)), 400.0};

    const auto n = static_cast<Eigen::Index>(lang.phones.size());
    lang.transitions.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      lang.transitions.row(i) = SampleDirichlet(n, spec.transition_concentration, rng).transpose();
    }
    lang.initial = SampleDirichlet(n, 1.0, rng);
    languages.push_back(std::move(lang));
  }
  return languages;
}

namespace {

int SampleIndex(const Eigen::Ref<const Eigen::VectorXd>& p, Rng& rng) {
  const double u = rng.Uniform();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size() - 1);
}

}  // namespace

UtteranceScript SampleScript(const SynthLanguage& language, Eigen::Index num_samples, Rng& rng) {
  UtteranceScript s;
  s.f0_hz = rng.Uniform(90.0, 240.0);
  s.tract_scale = rng.Uniform(0.92, 1.08);
  Eigen::Index total = 0;
  int phone = SampleIndex(language.initial, rng);
  while (total < num_samples) {
    const auto& p = language.phones[static_cast<std::size_t>(phone)];
    auto d = static_cast<Eigen::Index>(p.mean_duration_s * rng.Uniform(0.6, 1.4) * kFs);
    d = std::max<Eigen::Index>(d, 2 * kFadeSamples);
    d = std::min(d, num_samples - total);
    s.phones.push_back(phone);
    s.durations.push_back(d);
    total += d;
    phone = SampleIndex(language.transitions.row(phone).transpose(), rng);
  }
  return s;
}

Eigen::VectorXd RenderSpeech(const SynthLanguage& language, const UtteranceScript& script, Rng& rng) {
  Eigen::Index total = 0;
  for (auto d : script.durations) total += d;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(total);

  double phase = 0.0;
  Eigen::Index pos = 0;
  for (std::size_t i = 0; i < script.phones.size(); ++i) {
    const auto& p = language.phones[static_cast<std::size_t>(script.phones[i])];
    const Eigen::Index len = script.durations[i];
    Eigen::VectorXd seg = Eigen::VectorXd::Zero(len);
    if (p.kind == PhoneKind::kVowel) {
      std::vector<Resonator> chain;
      for (const auto& r : p.resonances) chain.emplace_back(r.freq_hz * script.tract_scale, r.bandwidth_hz);
      chain.emplace_back(language.timbre.freq_hz, language.timbre.bandwidth_hz);
      double tilt1 = 0.0, tilt2 = 0.0;
      for (Eigen::Index n = 0; n < len; ++n) {
        phase += script.f0_hz * (1.0 + 0.01 * rng.Normal()) / kFs;
        double x = 0.02 * rng.Normal();
        if (phase >= 1.0) {
          phase -= 1.0;
          x += 1.0;
        }
        tilt1 = x + 0.9 * tilt1;
        tilt2 = tilt1 + 0.5 * tilt2;
        double y = tilt2;
        for (auto& r : chain) y = r(y);
        seg[n] = y;
      }
    } else if (p.kind == PhoneKind::kFricative) {
      const auto& r = p.resonances.front();
      Resonator a(r.freq_hz * script.tract_scale, r.bandwidth_hz);
      Resonator b(r.freq_hz * script.tract_scale, r.bandwidth_hz);
      for (Eigen::Index n = 0; n < len; ++n) seg[n] = b(a(rng.Normal()));
    }
    if (p.kind != PhoneKind::kSilence) {
      const double rms = std::sqrt(Power(seg));
      const double level = (p.kind == PhoneKind::kVowel ? 1.0 : 0.35) * std::pow(10.0, rng.Uniform(-2.0, 2.0) / 20.0);
      if (rms > 0.0) seg *= level / rms;
      Fade(seg);
    }
    out.segment(pos, len) = seg;
    pos += len;
  }
  const double rms = std::sqrt(Power(out));
  if (rms > 0.0) out *= kUtteranceRms / rms;
  return out;
}

Eigen::VectorXd ApplyChannel(const Eigen::VectorXd& speech, const DomainChannel& channel, Rng& rng) {
  Eigen::VectorXd y = speech;
  if (channel.clean) {
    const double sigma = std::sqrt(Power(speech) / std::pow(10.0, channel.dither_snr_db / 10.0));
    for (Eigen::Index n = 0; n < y.size(); ++n) y[n] += sigma * rng.Normal();
    return y;
  }
  // 6th-order Butterworth high-pass and low-pass sections.
  constexpr double kQ[3] = {0.5176380902, 0.7071067812, 1.9318516526};
  for (double q : kQ) {
    Biquad hp = Biquad::HighPass(channel.band_low_hz, q);
    Biquad lp = Biquad::LowPass(channel.band_high_hz, q);
    for (Eigen::Index n = 0; n < y.size(); ++n) y[n] = lp(hp(y[n]));
  }
  Eigen::VectorXd noise(y.size());
  double state = 0.0;
  for (Eigen::Index n = 0; n < y.size(); ++n) {
    state = rng.Normal() + channel.noise_tilt * state;
    noise[n] = state;
  }
  const double snr_db = rng.Uniform(channel.snr_min_db, channel.snr_max_db);
  const double noise_power = Power(y) / std::pow(10.0, snr_db / 10.0);
  y += noise * std::sqrt(noise_power / Power(noise));
  y *= std::pow(10.0, rng.Uniform(channel.gain_min_db, channel.gain_max_db) / 20.0);
  return y.cwiseMax(-1.0).cwiseMin(1.0);
}

Manifest Generate(const SynthSpec& spec, const std::filesystem::path& out_dir, int jobs) {
  const auto languages = BuildLanguages(spec);
  const auto num_samples = static_cast<Eigen::Index>(std::llround(spec.utterance_seconds * kFs));

  struct Job {
    ManifestRecord record;
    const SynthLanguage* language;
    const DomainChannel* channel;
    std::uint64_t stream;
  };
  std::vector<Job> work;
  const std::pair<Split, int> splits[] = {{Split::kTrain, spec.train_per_language},
                                          {Split::kValid, spec.valid_per_language},
                                          {Split::kEval, spec.eval_per_language}};
  const DomainChannel* channels[] = {&spec.source, &spec.target};
  for (const auto& [split, count] : splits) {
    for (const DomainChannel* ch : channels) {
      for (const auto& lang : languages) {
        for (int i = 0; i < count; ++i) {
          char file[64];
          std::snprintf(file, sizeof(file), "%s-%05d.wav", lang.name.c_str(), i);
          ManifestRecord r;
          r.path = (std::filesystem::path(ch->name) / std::string(SplitName(split)) / lang.name / file).generic_string();
          r.language = lang.name;
          r.domain = ch->name;
          r.split = split;
          work.push_back({std::move(r), &lang, ch, static_cast<std::uint64_t>(work.size())});
        }
      }
    }
  }

  try {
    for (const auto& j : work) std::filesystem::create_directories(out_dir / std::filesystem::path(j.record.path).parent_path());
  } catch (const std::filesystem::filesystem_error& e) {
    throw DataError("synth: cannot create output directory under " + out_dir.string() + ": " + e.what());
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= work.size()) return;
      try {
        const Job& j = work[k];
        Rng rng = Rng::Derive(spec.seed, 0x5EED0000ull + j.stream);
        const auto script = SampleScript(*j.language, num_samples, rng);
        const auto speech = RenderSpeech(*j.language, script, rng);
        frontend::WriteWav((out_dir / j.record.path).string(), ApplyChannel(speech, *j.channel, rng));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = work.size();
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

  Manifest m;
  m.base_dir = out_dir;
  for (auto& j : work) m.records.push_back(std::move(j.record));
  WriteManifest(m, out_dir / "manifest.tsv");
  return m;
}

}  // namespace lid::corpus
