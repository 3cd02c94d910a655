// include/lid/commands.hpp

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

#ifndef LID_COMMANDS_HPP_
#define LID_COMMANDS_HPP_

#include <ostream>

#include "lid/config.hpp"

namespace lid::cli {

/// Each command writes into config.RunDir(), creating it and its
/// checkpoints/, logs/, reports/ and figures/ subdirectories, and leaves the
/// resolved configuration there as config.ini.

/// Synthetic corpus under <run>/corpus.
void RunSynth(const Config& config, int jobs);

/// Every record of the audio manifest, cut into 3-second segments, into
/// <run>/features/<kind>/ with a feature manifest. Output bytes do not
/// depend on `jobs`.
void RunFeaturize(const Config& config, int jobs);

/// Trains the [train] variant; writes the checkpoint and the step/epoch logs.
void RunTrain(const Config& config);

/// Cross-domain evaluation of every configured checkpoint. Writes
/// reports/eval.json and reports/eval.txt and prints the table to `out`.
void RunEvaluate(const Config& config, std::ostream& out);

/// t-SNE of last-hidden-layer representations, scatter plots colored by
/// domain and by language, and the coordinates as CSV.
void RunProject(const Config& config);

}  // namespace lid::cli

#endif  // LID_COMMANDS_HPP_
