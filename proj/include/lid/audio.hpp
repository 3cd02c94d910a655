// include/lid/audio.hpp

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

#ifndef LID_AUDIO_HPP_
#define LID_AUDIO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lid::frontend {

inline constexpr int kSampleRate = 16000;
inline constexpr Eigen::Index kSegmentSamples = 3 * kSampleRate;

/// 3-second slice of an utterance, samples scaled to [-1, 1].
struct AudioSegment {
  Eigen::VectorXd samples;
  int sample_rate = kSampleRate;
  std::string language;
  std::string domain;
};

enum class SegmentStatus { kOk, kTooShort };

struct SegmentResult {
  std::vector<Eigen::VectorXd> segments;
  SegmentStatus status = SegmentStatus::kOk;
  Eigen::Index dropped_samples = 0;
};

/// Cuts consecutive non-overlapping 48,000-sample windows and discards the
/// remainder. Audio shorter than one window yields no segments and
/// kTooShort. Throws ConfigError for any sample rate other than 16 kHz.
SegmentResult Segment(const Eigen::VectorXd& samples, int sample_rate);

struct WavData {
  Eigen::VectorXd samples;
  int sample_rate = 0;
};

/// Reads a RIFF/WAVE file. Only PCM, 16-bit, mono, 16 kHz is accepted;
/// anything else throws DataError naming the offending field.
WavData ReadWav(const std::string& path);

/// Writes 16-bit PCM mono. Samples are clipped to [-1, 1] and scaled by
/// 32768 with rounding.
void WriteWav(const std::string& path, const Eigen::VectorXd& samples, int sample_rate = kSampleRate);

}  // namespace lid::frontend

#endif  // LID_AUDIO_HPP_
