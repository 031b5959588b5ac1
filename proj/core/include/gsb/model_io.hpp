// Copyright 2026 The gsb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gsb/spectral.hpp"

namespace gsb {

/// JSON model description:
///
///   {"H_e": [[re, im], ...],              // n*n entries, row-major
///    "betas": [[[re, im], ...], ...],     // r vectors of length n
///    "form_factors": [{"kind": "lorentzian", "gamma": 1, "lambda": 1,
///                      "omega0": 0}, ...]}
///
/// Kinds are flat, lorentzian, box_window (alias box) and tabulated; the
/// last takes "omega" and "density" arrays. Real entries may be given as
/// plain numbers. Throws ConfigParse on malformed input and InvalidModel
/// when the parsed model breaks an invariant.
ModelSpec parse_model(std::string_view text);
ModelSpec load_model(const std::filesystem::path& path);

/// Canonical serialization accepted by parse_model.
std::string model_to_json(const ModelSpec& spec);

}  // namespace gsb
