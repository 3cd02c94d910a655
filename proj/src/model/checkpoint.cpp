// src/model/checkpoint.cpp

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

#include <fstream>
#include <map>

#include "lid/binary_io.hpp"
#include "lid/model.hpp"

namespace lid::model {

void SaveCheckpoint(LidModel& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write checkpoint " + path);
  os.write("LIDM", 4);
  io::WriteLE<std::uint16_t>(os, kCheckpointVersion);
  io::WriteLE<std::uint8_t>(os, static_cast<std::uint8_t>(model.variant()));
  for (const StateEntry& e : model.State()) {
    io::WriteLE<std::uint32_t>(os, static_cast<std::uint32_t>(e.name.size()));
    os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    io::WriteLE<std::uint32_t>(os, static_cast<std::uint32_t>(e.shape.size()));
    for (Index d : e.shape) io::WriteLE<std::uint32_t>(os, static_cast<std::uint32_t>(d));
    for (Index i = 0; i < e.size; ++i) io::WriteLE<double>(os, e.data[i]);
  }
  if (!os) throw DataError("error while writing checkpoint " + path);
}

LidModel LoadCheckpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("checkpoint not found: " + path);
  const std::string what = "checkpoint " + path;
  io::ExpectMagic(is, "LIDM", what);
  const auto version = io::ReadLE<std::uint16_t>(is, what);
  if (version != kCheckpointVersion) {
    throw DataError(what + ": unsupported version " + std::to_string(version));
  }
  const auto tag = io::ReadLE<std::uint8_t>(is, what);
  if (tag > 2) throw DataError(what + ": unknown variant tag " + std::to_string(tag));
  const auto variant = static_cast<Variant>(tag);

  std::map<std::string, Tensor> tensors;
  while (is.peek() != std::char_traits<char>::eof()) {
    const auto name_len = io::ReadLE<std::uint32_t>(is, what);
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len)) throw DataError(what + ": truncated tensor name");
    const auto rank = io::ReadLE<std::uint32_t>(is, what);
    Tensor::Shape shape(rank);
    for (auto& d : shape) d = io::ReadLE<std::uint32_t>(is, what);
    Tensor t(shape);
    for (Index i = 0; i < t.size(); ++i) t.data()[i] = io::ReadLE<double>(is, what);
    tensors.emplace(std::move(name), std::move(t));
  }

  auto need = [&](const std::string& name) -> const Tensor& {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw DataError(what + ": missing tensor " + name);
    return it->second;
  };
  Architecture arch;
  for (std::size_t i = 0; i < 3; ++i) {
    const Tensor& w = need("conv" + std::to_string(i + 1) + ".weight");
    if (w.rank() != 3) throw DataError(what + ": conv weight must be rank 3");
    arch.filters[i] = w.dim(0);
    arch.widths[i] = w.dim(2);
    if (i == 0) arch.input_dim = w.dim(1);
  }
  arch.hidden = need("fc1.weight").dim(0);
  arch.num_languages = need("fc2.weight").dim(0);
  if (variant != Variant::kNone) {
    arch.domain_hidden = need("domain1.weight").dim(0);
    arch.num_domains = need("domain3.weight").dim(0);
  }

  Rng unused(0);
  LidModel model(arch, variant, unused);
  for (const StateEntry& e : model.State()) {
    const Tensor& t = need(e.name);
    if (t.shape() != e.shape) {
      throw DataError(what + ": tensor " + e.name + " has shape " + Tensor::ShapeString(t.shape()) +
                      ", expected " + Tensor::ShapeString(e.shape));
    }
    std::copy(t.data(), t.data() + t.size(), e.data);
  }
  if (tensors.size() != model.State().size()) throw DataError(what + ": unexpected extra tensors");
  return model;
}

void WriteRepresentations(const Tensor& rows, const std::string& path) {
  RequireRank(rows, 2, "representation dump");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path);
  os.write("LIDR", 4);
  io::WriteLE<std::uint32_t>(os, static_cast<std::uint32_t>(rows.dim(0)));
  io::WriteLE<std::uint32_t>(os, static_cast<std::uint32_t>(rows.dim(1)));
  for (Index i = 0; i < rows.size(); ++i) io::WriteLE<float>(os, static_cast<float>(rows.data()[i]));
}

Tensor ReadRepresentations(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("representation dump not found: " + path);
  io::ExpectMagic(is, "LIDR", path);
  const auto n = io::ReadLE<std::uint32_t>(is, path);
  const auto dim = io::ReadLE<std::uint32_t>(is, path);
  Tensor t({static_cast<Index>(n), static_cast<Index>(dim)});
  for (Index i = 0; i < t.size(); ++i) t.data()[i] = io::ReadLE<float>(is, path);
  return t;
}

}  // namespace lid::model
