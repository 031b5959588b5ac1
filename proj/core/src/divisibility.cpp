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
#include "gsb/divisibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "gsb/channels.hpp"
#include "gsb/error.hpp"

namespace gsb {

namespace {

bool singular(const Matrix& a) {
  const double smax = operator_norm(a);
  return !(smallest_singular_value(a) > 1e-12 * std::max(1.0, smax));
}

}  // namespace

DivisibilityReport classify(const SurvivalOperator& a, const ClassifyOptions& options) {
  const TimeGrid& grid = a.grid();
  if (!(grid.step > 0.0)) throw Error(ErrorKind::NonUniformGrid, "grid step must be positive");

  DivisibilityReport rep;
  rep.step = grid.step;
  std::vector<double> norms(a.size());
  std::vector<bool> sing(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    norms[k] = operator_norm(a.at(k));
    sing[k] = singular(a.at(k));
    if (sing[k]) rep.excluded_times.push_back(grid.time(k));
  }
  rep.final_norm = norms.back();

  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    StepCheck sc;
    sc.t = grid.time(k);
    sc.norm = norms[k];
    sc.norm_rate = (norms[k + 1] - norms[k]) / grid.step;
    if (sing[k] || sing[k + 1]) {
      sc.excluded = true;
      rep.steps.push_back(sc);
      continue;
    }
    const double tol = options.norm_slack * (1.0 + norms[k]);
    sc.monotone = norms[k + 1] - norms[k] <= tol;

    // The same slack expressed for the one-step propagator: a norm increase
    // of tol at ||A(t_k)|| is a relative expansion of tol / ||A(t_k)||.
    const double rel = tol / norms[k];
    const Matrix step_prop = propagator(a.at(k + 1), a.at(k));
    sc.step_propagator_norm = operator_norm(step_prop);
    sc.step_positive = sc.step_propagator_norm <= 1.0 + rel;
    sc.step_choi_min = choi(step_prop).min_eigenvalue();
    sc.step_cp = sc.step_choi_min >= -((1.0 + rel) * (1.0 + rel) - 1.0);

    rep.norm_monotone = rep.norm_monotone && sc.monotone;
    rep.cp_divisible = rep.cp_divisible && sc.step_cp;
    rep.p_divisible = rep.p_divisible && sc.step_positive;
    if (!sc.monotone && !rep.first_violation_time) rep.first_violation_time = sc.t;
    if (sc.monotone != sc.step_cp) rep.criteria_consistent = false;
    rep.steps.push_back(sc);
  }
  rep.semigroup_residual = semigroup_residual(a);
  rep.semigroup = rep.semigroup_residual <= options.semigroup_tol;
  return rep;
}

double trace_norm_rate_max(const SurvivalOperator& a, const Matrix& x) {
  double worst = -std::numeric_limits<double>::infinity();
  double prev = trace_norm(apply_channel(a.at(0), x));
  for (std::size_t k = 1; k < a.size(); ++k) {
    const double cur = trace_norm(apply_channel(a.at(k), x));
    worst = std::max(worst, (cur - prev) / a.grid().step);
    prev = cur;
  }
  return worst;
}

double trace_norm_contraction_scan(const SurvivalOperator& a, int samples, std::uint64_t seed) {
  const auto d = a.dim() + 1;
  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    auto rng = sample_stream(seed, static_cast<std::uint64_t>(s));
    worst = std::max(worst, trace_norm_rate_max(a, gue_matrix(d, rng)));
  }
  return worst;
}

std::string report_to_json(const DivisibilityReport& report) {
  nlohmann::ordered_json j;
  j["step"] = report.step;
  j["grid_points"] = report.steps.size() + 1;
  j["norm_monotone"] = report.norm_monotone;
  j["cp_divisible"] = report.cp_divisible;
  j["p_divisible"] = report.p_divisible;
  j["semigroup"] = report.semigroup;
  j["semigroup_residual"] = report.semigroup_residual;
  j["criteria_consistent"] = report.criteria_consistent;
  if (report.first_violation_time) {
    j["first_violation_time"] = *report.first_violation_time;
  } else {
    j["first_violation_time"] = nullptr;
  }
  nlohmann::ordered_json violations = nlohmann::ordered_json::array();
  for (const auto& s : report.steps) {
    if (!s.excluded && !s.monotone) violations.push_back(s.t);
  }
  j["violation_times"] = violations;
  j["excluded_times"] = report.excluded_times;
  j["final_norm"] = report.final_norm;
  return j.dump(2) + "\n";
}

void write_report_csv(std::ostream& os, const DivisibilityReport& report) {
  os << "t,norm,norm_rate,step_choi_min,monotone,step_cp,excluded\n";
  char buf[160];
  for (const auto& s : report.steps) {
    std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.17g,%.17g,%d,%d,%d\n", s.t, s.norm, s.norm_rate,
                  s.step_choi_min, s.monotone ? 1 : 0, s.step_cp ? 1 : 0, s.excluded ? 1 : 0);
    os << buf;
  }
}

}  // namespace gsb
