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

#include "gsb/error.hpp"

namespace gsb {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::FlatKernelNotSampleable: return "FlatKernelNotSampleable";
    case ErrorKind::InvalidBandwidth: return "InvalidBandwidth";
    case ErrorKind::StepTooCoarse: return "StepTooCoarse";
    case ErrorKind::MixedKinds: return "MixedKinds";
    case ErrorKind::NotFlatCoupling: return "NotFlatCoupling";
    case ErrorKind::NotContractive: return "NotContractive";
    case ErrorKind::SingularSurvival: return "SingularSurvival";
    case ErrorKind::NonUniformGrid: return "NonUniformGrid";
    case ErrorKind::TimeNotOnGrid: return "TimeNotOnGrid";
    case ErrorKind::BasisTooLarge: return "BasisTooLarge";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::TruncationOverflow: return "TruncationOverflow";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace gsb
