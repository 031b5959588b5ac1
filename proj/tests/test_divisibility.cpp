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
#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "gsb/divisibility.hpp"
#include "gsb/dynamics.hpp"
#include "oracles.hpp"

using namespace gsb;

namespace {

SurvivalOperator lorentzian(double gamma, double lambda, double horizon, double step = 1e-3) {
  return solve_survival(qubit_model(0.0, FormFactor::lorentzian(gamma, lambda)), horizon, step);
}

}  // namespace

TEST_CASE("flat coupling is a cp-divisible semigroup") {
  const DivisibilityReport r = classify(closed_form_flat(qubit_model(0.4, FormFactor::flat(1.0)), 4.0, 1e-2));
  CHECK(r.cp_divisible);
  CHECK(r.p_divisible);
  CHECK(r.semigroup);
  CHECK(r.norm_monotone);
  CHECK_FALSE(r.first_violation_time.has_value());
  CHECK(r.criteria_consistent);
}

TEST_CASE("underdamped lorentzian violates p-divisibility at the first zero") {
  const SurvivalOperator a = lorentzian(8.0, 1.0, 3.0);
  const DivisibilityReport r = classify(a);
  CHECK_FALSE(r.p_divisible);
  CHECK_FALSE(r.cp_divisible);
  CHECK_FALSE(r.semigroup);
  REQUIRE(r.first_violation_time.has_value());
  const double t_star = gsb_test::pseudomode_first_zero(8.0, 1.0);
  CHECK(t_star == doctest::Approx(2.0 * (std::numbers::pi - std::atan(std::sqrt(15.0))) / std::sqrt(15.0)));
  CHECK(std::abs(*r.first_violation_time - t_star) <= 2e-3);
  CHECK(r.criteria_consistent);
}

TEST_CASE("overdamped lorentzian is cp-divisible but not a semigroup") {
  const DivisibilityReport r = classify(lorentzian(0.1, 1.0, 6.0));
  CHECK(r.cp_divisible);
  CHECK(r.p_divisible);
  CHECK_FALSE(r.semigroup);
  CHECK(r.semigroup_residual > 1e-8);
  CHECK(r.criteria_consistent);
}

TEST_CASE("qubit norm is the modulus of the amplitude") {
  const SurvivalOperator a = lorentzian(1.0, 1.0, 6.0, 1e-2);
  const DivisibilityReport r = classify(a);
  for (std::size_t k = 0; k < r.steps.size(); ++k) {
    CHECK(r.steps[k].norm == doctest::Approx(std::abs(a.at(k)(0, 0))).epsilon(1e-14));
    const bool grows = std::abs(a.at(k + 1)(0, 0)) > std::abs(a.at(k)(0, 0)) * (1 + 1e-9) + 1e-9;
    if (!r.steps[k].excluded) CHECK(r.steps[k].monotone == !grows);
  }
}

TEST_CASE("one-step criteria agree across the lorentzian sweep") {
  for (double gamma : {0.1, 1.0, 8.0}) {
    for (double lambda : {0.5, 1.0, 2.0}) {
      const DivisibilityReport r = classify(lorentzian(gamma, lambda, 8.0, 2e-3));
      CHECK(r.criteria_consistent);
      CHECK(r.p_divisible == !(lambda < 2.0 * gamma));
    }
  }
}

TEST_CASE("trace norm contraction scan") {
  const SurvivalOperator flat = closed_form_flat(qubit_model(0.0, FormFactor::flat(1.0)), 3.0, 1e-3);
  CHECK(trace_norm_contraction_scan(flat, 100, 11) <= 1e-6);
  CHECK(std::abs(trace_norm_rate_max(flat, Matrix::Identity(2, 2))) < 1e-10);
  const SurvivalOperator under = lorentzian(8.0, 1.0, 2.0);
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  CHECK(trace_norm_rate_max(under, z) > 0.01);
  CHECK(trace_norm_contraction_scan(under, 100, 11) > 0.01);
  // Scans are seeded.
  CHECK(trace_norm_contraction_scan(under, 20, 5) == trace_norm_contraction_scan(under, 20, 5));
  // A p-divisible family never expands a sampled input.
  const SurvivalOperator over = lorentzian(0.1, 2.0, 4.0);
  REQUIRE(classify(over).p_divisible);
  CHECK(trace_norm_contraction_scan(over, 100, 3) <= 1e-6);
}

TEST_CASE("multi-level family") {
  ModelSpec spec;
  spec.h_excited = Matrix{{0.0, 0.2}, {0.2, 0.5}};
  spec.betas = {Vector{{1.0, 0.5}}};
  spec.form_factors = {FormFactor::flat(1.0)};
  const DivisibilityReport r = classify(closed_form_flat(spec, 4.0, 1e-2));
  CHECK(r.cp_divisible);
  CHECK(r.semigroup);
  for (const auto& s : r.steps) CHECK(s.step_propagator_norm <= 1.0 + 1e-12);
}

TEST_CASE("report serialization") {
  const DivisibilityReport r = classify(lorentzian(8.0, 1.0, 2.0, 1e-2));
  const auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j.at("p_divisible") == false);
  CHECK(j.at("first_violation_time").get<double>() == doctest::Approx(*r.first_violation_time));
  CHECK(report_to_json(r) == report_to_json(r));
  std::ostringstream os;
  write_report_csv(os, r);
  CHECK(os.str().rfind("t,norm,norm_rate,step_choi_min,monotone,step_cp,excluded\n", 0) == 0);
}
