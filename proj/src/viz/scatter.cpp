// src/viz/scatter.cpp

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

#include "lid/scatter.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fmt/format.h>

namespace lid::viz {

namespace {

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr double kPlot = 560.0;
constexpr double kMargin = 20.0;
constexpr double kLegendWidth = 160.0;
constexpr double kTitleHeight = 30.0;

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::span<const char* const> Palette() { return kPalette; }

std::string RenderScatterSvg(const Eigen::Ref<const RowMatrixXd>& coords, std::span<const int> labels,
                             std::span<const std::string> label_names, const std::string& title) {
  if (coords.rows() != static_cast<Index>(labels.size())) {
    throw DimensionError("scatter: " + std::to_string(coords.rows()) + " points but " +
                         std::to_string(labels.size()) + " labels");
  }
  if (coords.rows() > 0 && coords.cols() != 2) throw DimensionError("scatter: coordinates must have 2 columns");
  for (int l : labels) {
    if (l < 0 || l >= static_cast<int>(label_names.size())) {
      throw DataError("scatter: label index " + std::to_string(l) + " has no name");
    }
  }

  const double width = kMargin * 3 + kPlot + kLegendWidth;
  const double height = kMargin * 2 + kTitleHeight + kPlot;
  std::string svg;
  svg += R"(<?xml version="1.0" encoding="UTF-8"?>)" "\n";
  svg += fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.0f}" height="{:.0f}" viewBox="0 0 {:.0f} {:.0f}">)" "\n",
                     width, height, width, height);
  svg += fmt::format(R"(<rect x="0" y="0" width="{:.0f}" height="{:.0f}" fill="#ffffff"/>)" "\n", width, height);
  svg += fmt::format(R"(<text x="{:.0f}" y="{:.0f}" font-family="sans-serif" font-size="16">{}</text>)" "\n", kMargin,
                     kMargin + 16.0, Escape(title));
  const double x0 = kMargin;
  const double y0 = kMargin + kTitleHeight;
  svg += fmt::format(R"(<rect x="{:.0f}" y="{:.0f}" width="{:.0f}" height="{:.0f}" fill="none" stroke="#000000"/>)" "\n",
                     x0, y0, kPlot, kPlot);

  if (coords.rows() > 0) {
    const double xmin = coords.col(0).minCoeff(), xmax = coords.col(0).maxCoeff();
    const double ymin = coords.col(1).minCoeff(), ymax = coords.col(1).maxCoeff();
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double scale = (kPlot - 20.0) / span;
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    svg += "<g>\n";
    for (Index i = 0; i < coords.rows(); ++i) {
      const double px = x0 + kPlot / 2 + (coords(i, 0) - cx) * scale;
      const double py = y0 + kPlot / 2 - (coords(i, 1) - cy) * scale;
      svg += fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="2.5" fill="{}" fill-opacity="0.7"/>)" "\n", px, py,
                         kPalette[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]) % kPalette.size()]);
    }
    svg += "</g>\n";
  }

  const double lx = x0 + kPlot + kMargin;
  svg += R"(<g font-family="sans-serif" font-size="12">)" "\n";
  for (std::size_t k = 0; k < label_names.size(); ++k) {
    const double ly = y0 + 10.0 + 20.0 * static_cast<double>(k);
    svg += fmt::format(R"(<rect x="{:.0f}" y="{:.0f}" width="12" height="12" fill="{}"/>)" "\n", lx, ly,
                       kPalette[k % kPalette.size()]);
    svg += fmt::format(R"(<text x="{:.0f}" y="{:.0f}">{}</text>)" "\n", lx + 18.0, ly + 11.0, Escape(label_names[k]));
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

std::string ScatterCsv(const Eigen::Ref<const RowMatrixXd>& coords, std::span<const std::string> domains,
                       std::span<const std::string> languages) {
  if (coords.rows() != static_cast<Index>(domains.size()) || domains.size() != languages.size()) {
    throw DimensionError("scatter: coordinate and label counts differ");
  }
  std::string out = "x,y,domain,language\n";
  for (Index i = 0; i < coords.rows(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    out += Shortest(coords(i, 0)) + ',' + Shortest(coords(i, 1)) + ',' + domains[k] + ',' + languages[k] + '\n';
  }
  return out;
}

}  // namespace lid::viz
