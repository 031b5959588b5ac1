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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gsb/dynamics.hpp"

namespace gsb {

/// One forward step [t_k, t_{k+1}] of the grid.
struct StepCheck {
  double t = 0.0;
  double norm = 0.0;         // ||A(t_k)||_op
  double norm_rate = 0.0;    // (||A(t_{k+1})|| - ||A(t_k)||) / h
  double step_choi_min = 0.0;  // min eigenvalue of Choi(V_{t_{k+1}, t_k})
  double step_propagator_norm = 0.0;  // ||A(t_{k+1}) A(t_k)^{-1}||_op
  bool monotone = true;      // norm non-increasing up to slack
  bool step_cp = true;       // one-step propagator completely positive
  bool step_positive = true; // one-step propagator contractive (positive)
  bool excluded = false;     // A(t_k) or A(t_{k+1}) numerically singular
};

struct DivisibilityReport {
  double step = 0.0;
  std::vector<StepCheck> steps;
  double final_norm = 0.0;
  bool norm_monotone = true;
  bool cp_divisible = true;
  bool p_divisible = true;
  bool semigroup = false;
  double semigroup_residual = 0.0;
  /// Start of the first step whose norm increases beyond the slack.
  std::optional<double> first_violation_time;
  std::vector<double> excluded_times;
  /// Norm flag equals the one-step Choi flag at every non-excluded step.
  bool criteria_consistent = true;
};

struct ClassifyOptions {
  /// Monotonicity slack tol_k = norm_slack * (1 + ||A(t_k)||).
  double norm_slack = 1e-9;
  double semigroup_tol = 1e-8;
};

DivisibilityReport classify(const SurvivalOperator& a, const ClassifyOptions& options = {});

/// Max over grid steps of the forward difference of ||L_t(X)||_1.
double trace_norm_rate_max(const SurvivalOperator& a, const Matrix& x);

/// Max of trace_norm_rate_max over `samples` Gaussian Hermitian X drawn
/// from independent per-sample streams of `seed`.
double trace_norm_contraction_scan(const SurvivalOperator& a, int samples, std::uint64_t seed);

std::string report_to_json(const DivisibilityReport& report);
void write_report_csv(std::ostream& os, const DivisibilityReport& report);

}  // namespace gsb
