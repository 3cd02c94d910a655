// include/lid/features.hpp

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

#ifndef LID_FEATURES_HPP_
#define LID_FEATURES_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "lid/audio.hpp"
#include "lid/tensor.hpp"

namespace lid::frontend {

inline constexpr Index kFrameLength = 400;  // 25 ms
inline constexpr Index kFrameHop = 160;     // 10 ms
inline constexpr Index kFftSize = 512;
inline constexpr Index kFeatureDim = 13;
inline constexpr Index kMfscFilters = 12;
inline constexpr Index kMfccFilters = 40;
inline constexpr double kLogFloor = 1e-10;

enum class FeatureKind : std::uint8_t { kMfsc = 0, kMfcc = 1 };

std::string_view FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(std::string_view name);

/// T×13 frames of one segment.
struct FeatureSequence {
  RowMatrixXd frames;
  FeatureKind kind = FeatureKind::kMfsc;
  bool normalized = false;

  Index num_frames() const { return frames.rows(); }
};

/// floor((N - 400) / 160) + 1; throws InputTooShortError when N < 400.
Index NumFrames(Index num_samples);

/// Splits into 400-sample frames with a 160-sample hop and applies a
/// Hamming window. Returns [num_frames, 400].
RowMatrixXd Frame(const Eigen::VectorXd& samples);

/// 0.54 - 0.46 cos(2 pi n / (N - 1)).
Eigen::VectorXd HammingWindow(Index length);

inline double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular filters with centers equally spaced on the mel scale,
/// quantized to FFT bins; each filter peaks at exactly 1 on its center bin.
/// Returns [num_filters, fft_size / 2 + 1]. Throws ConfigError when the band
/// is invalid or two adjacent edges fall on the same bin.
RowMatrixXd MelFilterbank(Index num_filters, Index fft_size, int sample_rate, double f_min,
                          double f_max);

/// Center frequency (Hz) of each filter built by MelFilterbank.
Eigen::VectorXd MelFilterCenters(Index num_filters, Index fft_size, int sample_rate, double f_min,
                                 double f_max);

/// Orthonormal DCT-II basis, [n, n]; the inverse is its transpose.
RowMatrixXd Dct2Matrix(Index n);

/// |FFT_512(frame)|^2 / 512 for bins 0..256, one row per frame.
RowMatrixXd PowerSpectrum(const RowMatrixXd& frames);

/// Raw (un-normalized) MFSC or MFCC features of one segment.
///   c0:  ln(mean(x_w^2) + 1e-10) over the windowed frame.
///   MFSC c1..c12: ln(max(E, 1e-10)) of a 12-filter 0-8 kHz mel bank.
///   MFCC c1..c12: orthonormal DCT-II of 40 floored log-mel energies.
FeatureSequence Extract(const Eigen::VectorXd& samples, FeatureKind kind);

/// Per-coefficient zero mean, unit (population) variance. Coefficients with
/// standard deviation below 1e-8 become zero. Throws DimensionError for T < 2.
FeatureSequence Cmvn(const FeatureSequence& features);

/// Extract followed by Cmvn.
inline FeatureSequence Featurize(const Eigen::VectorXd& samples, FeatureKind kind) {
  return Cmvn(Extract(samples, kind));
}

// Feature files: "LIDF", u16 version, u8 kind, u32 T, u32 dim, then T*dim
// f32 values row-major; little-endian throughout.
inline constexpr std::uint16_t kFeatureFileVersion = 1;

void WriteFeatures(const FeatureSequence& features, const std::string& path);
FeatureSequence ReadFeatures(const std::string& path);

}  // namespace lid::frontend

#endif  // LID_FEATURES_HPP_
