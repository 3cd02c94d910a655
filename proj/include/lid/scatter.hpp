// include/lid/scatter.hpp

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

#ifndef LID_SCATTER_HPP_
#define LID_SCATTER_HPP_

#include <span>
#include <string>
#include <vector>

#include "lid/tensor.hpp"

namespace lid::viz {

enum class ColorBy { kDomain, kLanguage };

/// Fixed palette; label k gets entry k modulo the palette size.
std::span<const char* const> Palette();

/// SVG 1.1 scatter of coords [N, 2] colored by `labels` (indices into
/// `label_names`), with one legend entry per name. Output is a pure
/// function of the inputs.
std::string RenderScatterSvg(const Eigen::Ref<const RowMatrixXd>& coords, std::span<const int> labels,
                             std::span<const std::string> label_names, const std::string& title);

/// "x,y,domain,language" rows.
std::string ScatterCsv(const Eigen::Ref<const RowMatrixXd>& coords, std::span<const std::string> domains,
                       std::span<const std::string> languages);

}  // namespace lid::viz

#endif  // LID_SCATTER_HPP_
