// src/frontend/audio.cpp

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

#include "lid/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "lid/binary_io.hpp"
#include "lid/error.hpp"

namespace lid::frontend {

SegmentResult Segment(const Eigen::VectorXd& samples, int sample_rate) {
  if (sample_rate != kSampleRate) {
    throw ConfigError("segment: sample rate " + std::to_string(sample_rate) + " Hz, expected 16000");
  }
  SegmentResult r;
  const Eigen::Index count = samples.size() / kSegmentSamples;
  if (count == 0) {
    r.status = SegmentStatus::kTooShort;
    r.dropped_samples = samples.size();
    return r;
  }
  for (Eigen::Index i = 0; i < count; ++i) {
    r.segments.emplace_back(samples.segment(i * kSegmentSamples, kSegmentSamples));
  }
  r.dropped_samples = samples.size() - count * kSegmentSamples;
  return r;
}

WavData ReadWav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("audio file not found: " + path);
  io::ExpectMagic(is, "RIFF", path);
  io::ReadLE<std::uint32_t>(is, path);
  io::ExpectMagic(is, "WAVE", path);

  bool have_fmt = false;
  WavData wav;
  for (;;) {
    char id[4];
    if (!is.read(id, 4)) throw DataError(path + ": no data chunk");
    const auto size = io::ReadLE<std::uint32_t>(is, path);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw DataError(path + ": fmt chunk too short");
      const auto format = io::ReadLE<std::uint16_t>(is, path);
      const auto channels = io::ReadLE<std::uint16_t>(is, path);
      const auto rate = io::ReadLE<std::uint32_t>(is, path);
      io::ReadLE<std::uint32_t>(is, path);  // byte rate
      io::ReadLE<std::uint16_t>(is, path);  // block align
      const auto bits = io::ReadLE<std::uint16_t>(is, path);
      if (format != 1) throw DataError(path + ": encoding " + std::to_string(format) + " is not PCM");
      if (channels != 1) throw DataError(path + ": " + std::to_string(channels) + " channels, expected mono");
      if (bits != 16) throw DataError(path + ": " + std::to_string(bits) + "-bit samples, expected 16-bit");
      if (rate != static_cast<std::uint32_t>(kSampleRate)) {
        throw DataError(path + ": sample rate " + std::to_string(rate) + " Hz, expected 16000");
      }
      wav.sample_rate = static_cast<int>(rate);
      is.ignore(size - 16 + (size & 1u));
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw DataError(path + ": data chunk before fmt chunk");
      const Eigen::Index n = size / 2;
      wav.samples.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        wav.samples[i] = static_cast<double>(io::ReadLE<std::int16_t>(is, path)) / 32768.0;
      }
      return wav;
    } else {
      is.ignore(size + (size & 1u));
    }
  }
}

void WriteWav(const std::string& path, const Eigen::VectorXd& samples, int sample_rate) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path);
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  os.write("RIFF", 4);
  io::WriteLE<std::uint32_t>(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  io::WriteLE<std::uint32_t>(os, 16);
  io::WriteLE<std::uint16_t>(os, 1);
  io::WriteLE<std::uint16_t>(os, 1);
  io::WriteLE<std::uint32_t>(os, static_cast<std::uint32_t>(sample_rate));
  io::WriteLE<std::uint32_t>(os, static_cast<std::uint32_t>(sample_rate * 2));
  io::WriteLE<std::uint16_t>(os, 2);
  io::WriteLE<std::uint16_t>(os, 16);
  os.write("data", 4);
  io::WriteLE<std::uint32_t>(os, data_bytes);
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    const double v = std::clamp(std::round(samples[i] * 32768.0), -32768.0, 32767.0);
    io::WriteLE<std::int16_t>(os, static_cast<std::int16_t>(v));
  }
  if (!os) throw DataError("error while writing " + path);
}

}  // namespace lid::frontend
