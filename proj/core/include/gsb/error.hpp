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

#include <stdexcept>
#include <string>

namespace gsb {

enum class ErrorKind {
  InvalidArgument,
  InvalidModel,
  ConfigParse,
  FlatKernelNotSampleable,
  InvalidBandwidth,
  StepTooCoarse,
  MixedKinds,
  NotFlatCoupling,
  NotContractive,
  SingularSurvival,
  NonUniformGrid,
  TimeNotOnGrid,
  BasisTooLarge,
  ConvergenceFailure,
  TruncationOverflow,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// drivers can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gsb
