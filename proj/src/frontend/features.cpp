// src/frontend/features.cpp

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

#include "lid/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "lid/binary_io.hpp"

namespace lid::frontend {

std::string_view FeatureKindName(FeatureKind kind) {
  return kind == FeatureKind::kMfsc ? "mfsc" : "mfcc";
}

FeatureKind ParseFeatureKind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "mfsc") return FeatureKind::kMfsc;
  if (lower == "mfcc") return FeatureKind::kMfcc;
  throw ConfigError("unknown feature kind '" + std::string(name) + "' (expected mfsc or mfcc)");
}

Index NumFrames(Index num_samples) {
  if (num_samples < kFrameLength) {
    throw InputTooShortError("frame: " + std::to_string(num_samples) + " samples, need at least " +
                             std::to_string(kFrameLength));
  }
  return (num_samples - kFrameLength) / kFrameHop + 1;
}

Eigen::VectorXd HammingWindow(Index length) {
  Eigen::VectorXd w(length);
  const double denom = static_cast<double>(length - 1);
  for (Index n = 0; n < length; ++n) {
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom);
  }
  return w;
}

RowMatrixXd Frame(const Eigen::VectorXd& samples) {
  const Index count = NumFrames(samples.size());
  static const Eigen::RowVectorXd window = HammingWindow(kFrameLength).transpose();
  RowMatrixXd frames(count, kFrameLength);
  for (Index i = 0; i < count; ++i) {
    frames.row(i) = samples.segment(i * kFrameHop, kFrameLength).transpose().cwiseProduct(window);
  }
  return frames;
}

namespace {

// Filter edge bins: floor((fft_size + 1) * hz / sample_rate) at num_filters + 2
// mel-equidistant points.
std::vector<Index> FilterEdges(Index num_filters, Index fft_size, int sample_rate, double f_min,
                               double f_max) {
  if (num_filters < 1) throw ConfigError("mel filterbank: need at least one filter");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0)) {
    throw ConfigError("mel filterbank: require 0 <= f_min < f_max <= sample_rate / 2");
  }
  const double mel_lo = HzToMel(f_min);
  const double mel_hi = HzToMel(f_max);
  std::vector<Index> edges(static_cast<std::size_t>(num_filters + 2));
  for (Index i = 0; i < num_filters + 2; ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / static_cast<double>(num_filters + 1);
    edges[static_cast<std::size_t>(i)] =
        static_cast<Index>(std::floor(static_cast<double>(fft_size + 1) * MelToHz(mel) / sample_rate));
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] <= edges[i - 1]) {
      throw ConfigError("mel filterbank: " + std::to_string(num_filters) + " filters are too many for a " +
                        std::to_string(fft_size) + "-point FFT over this band");
    }
  }
  return edges;
}

}  // namespace

RowMatrixXd MelFilterbank(Index num_filters, Index fft_size, int sample_rate, double f_min,
                          double f_max) {
  const auto edges = FilterEdges(num_filters, fft_size, sample_rate, f_min, f_max);
  RowMatrixXd bank = RowMatrixXd::Zero(num_filters, fft_size / 2 + 1);
  for (Index j = 0; j < num_filters; ++j) {
    const Index lo = edges[static_cast<std::size_t>(j)];
    const Index mid = edges[static_cast<std::size_t>(j + 1)];
    const Index hi = edges[static_cast<std::size_t>(j + 2)];
    for (Index k = lo; k <= mid; ++k) {
      bank(j, k) = static_cast<double>(k - lo) / static_cast<double>(mid - lo);
    }
    for (Index k = mid; k <= hi && k < bank.cols(); ++k) {
      bank(j, k) = static_cast<double>(hi - k) / static_cast<double>(hi - mid);
    }
  }
  return bank;
}

Eigen::VectorXd MelFilterCenters(Index num_filters, Index fft_size, int sample_rate, double f_min,
                                 double f_max) {
  const auto edges = FilterEdges(num_filters, fft_size, sample_rate, f_min, f_max);
  Eigen::VectorXd centers(num_filters);
  for (Index j = 0; j < num_filters; ++j) {
    centers[j] = static_cast<double>(edges[static_cast<std::size_t>(j + 1)]) * sample_rate /
                 static_cast<double>(fft_size);
  }
  return centers;
}

RowMatrixXd Dct2Matrix(Index n) {
  RowMatrixXd d(n, n);
  const double nn = static_cast<double>(n);
  for (Index k = 0; k < n; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / nn) : std::sqrt(2.0 / nn);
    for (Index i = 0; i < n; ++i) {
      d(k, i) = scale * std::cos(std::numbers::pi * static_cast<double>(k) *
                                 (2.0 * static_cast<double>(i) + 1.0) / (2.0 * nn));
    }
  }
  return d;
}

RowMatrixXd PowerSpectrum(const RowMatrixXd& frames) {
  const Index bins = kFftSize / 2 + 1;
  RowMatrixXd power(frames.rows(), bins);
  Eigen::FFT<double> fft;
  std::vector<double> padded(static_cast<std::size_t>(kFftSize));
  std::vector<std::complex<double>> spectrum;
  for (Index i = 0; i < frames.rows(); ++i) {
    std::fill(padded.begin(), padded.end(), 0.0);
    std::copy_n(frames.row(i).data(), std::min(frames.cols(), kFftSize), padded.begin());
    fft.fwd(spectrum, padded);
    for (Index k = 0; k < bins; ++k) {
      power(i, k) = std::norm(spectrum[static_cast<std::size_t>(k)]) / static_cast<double>(kFftSize);
    }
  }
  return power;
}

FeatureSequence Extract(const Eigen::VectorXd& samples, FeatureKind kind) {
  const RowMatrixXd frames = Frame(samples);
  const RowMatrixXd power = PowerSpectrum(frames);

  FeatureSequence out;
  out.kind = kind;
  out.frames.resize(frames.rows(), kFeatureDim);
  out.frames.col(0) =
      ((frames.array().square().rowwise().sum() / static_cast<double>(kFrameLength)) + kLogFloor).log().matrix();

  if (kind == FeatureKind::kMfsc) {
    static const RowMatrixXd bank = MelFilterbank(kMfscFilters, kFftSize, kSampleRate, 0.0, kSampleRate / 2.0);
    const RowMatrixXd energies = power * bank.transpose();
    out.frames.rightCols(kMfscFilters) = energies.array().max(kLogFloor).log().matrix();
  } else {
    static const RowMatrixXd bank = MelFilterbank(kMfccFilters, kFftSize, kSampleRate, 0.0, kSampleRate / 2.0);
    static const RowMatrixXd dct = Dct2Matrix(kMfccFilters);
    const RowMatrixXd log_mel = (power * bank.transpose()).array().max(kLogFloor).log().matrix();
    const RowMatrixXd cepstra = log_mel * dct.transpose();
    out.frames.rightCols(kFeatureDim - 1) = cepstra.middleCols(1, kFeatureDim - 1);
  }
  return out;
}

FeatureSequence Cmvn(const FeatureSequence& features) {
  const Index t = features.frames.rows();
  if (t < 2) throw DimensionError("cmvn: need at least 2 frames, got " + std::to_string(t));
  FeatureSequence out = features;
  const double n = static_cast<double>(t);
  for (Index c = 0; c < out.frames.cols(); ++c) {
    auto col = out.frames.col(c);
    const double mean = col.sum() / n;
    col.array() -= mean;
    const double stddev = std::sqrt(col.squaredNorm() / n);
    if (stddev < 1e-8) {
      col.setZero();
    } else {
      col /= stddev;
    }
  }
  out.normalized = true;
  return out;
}

void WriteFeatures(const FeatureSequence& features, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path);
  os.write("LIDF", 4);
  io::WriteLE<std::uint16_t>(os, kFeatureFileVersion);
  io::WriteLE<std::uint8_t>(os, static_cast<std::uint8_t>(features.kind));
  io::WriteLE<std::uint32_t>(os, static_cast<std::uint32_t>(features.frames.rows()));
  io::WriteLE<std::uint32_t>(os, static_cast<std::uint32_t>(features.frames.cols()));
  for (Index i = 0; i < features.frames.size(); ++i) {
    io::WriteLE<float>(os, static_cast<float>(features.frames.data()[i]));
  }
  if (!os) throw DataError("error while writing " + path);
}

FeatureSequence ReadFeatures(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("feature file not found: " + path);
  io::ExpectMagic(is, "LIDF", path);
  const auto version = io::ReadLE<std::uint16_t>(is, path);
  if (version != kFeatureFileVersion) throw DataError(path + ": unsupported version " + std::to_string(version));
  const auto kind = io::ReadLE<std::uint8_t>(is, path);
  if (kind > 1) throw DataError(path + ": unknown feature kind " + std::to_string(kind));
  const auto t = io::ReadLE<std::uint32_t>(is, path);
  const auto dim = io::ReadLE<std::uint32_t>(is, path);
  FeatureSequence out;
  out.kind = static_cast<FeatureKind>(kind);
  out.frames.resize(t, dim);
  for (Index i = 0; i < out.frames.size(); ++i) out.frames.data()[i] = io::ReadLE<float>(is, path);
  return out;
}

}  // namespace lid::frontend
