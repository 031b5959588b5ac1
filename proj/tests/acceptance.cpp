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
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gsb/channels.hpp"
#include "gsb/divisibility.hpp"
#include "gsb/dynamics.hpp"
#include "gsb/fock.hpp"
#include "gsb/regression.hpp"
#include "gsb/spectral.hpp"
#include "oracles.hpp"

using namespace gsb;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

// Max pointwise relative error of |<e,vac|psi(t)>|^2 against e^{-gamma t}.
double flat_survival_error(double w, int m, double gamma, double horizon) {
  const ModelSpec spec = qubit_model(0.0, FormFactor::flat(gamma));
  const DiscretizedBath bath = discretize_bath(spec, w, m);
  const SurvivalOperator a = extract_survival(spec, bath, horizon, 0.005);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a.grid().time(k);
    const double exact = std::exp(-gamma * t);
    worst = std::max(worst, std::abs(std::norm(a.at(k)(0, 0)) - exact) / exact);
  }
  return worst;
}

Outcome flat_exponential_law() {
  const double e20 = flat_survival_error(20.0, 400, 1.0, 3.0);
  const double e40 = flat_survival_error(40.0, 800, 1.0, 3.0);
  return {e20 <= 2e-2 && e40 < e20,
          fmt("max rel err W=20,M=400: %.4e (tol 2e-2); W=40,M=800: %.4e", e20, e40)};
}

double volterra_error(double h) {
  const ModelSpec spec = qubit_model(0.0, FormFactor::lorentzian(1.0, 1.0));
  const SurvivalOperator a = solve_survival(spec, 5.0, h);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto ref = gsb_test::pseudomode_amplitude(a.grid().time(k), 1.0, 1.0);
    worst = std::max(worst, std::abs(a.at(k)(0, 0) - ref));
  }
  return worst;
}

Outcome volterra_accuracy() {
  const double e1 = volterra_error(1e-3);
  const double e2 = volterra_error(2e-3);
  const double ratio = e2 / e1;
  return {e1 <= 1e-6 && ratio > 3.5 && ratio < 4.5,
          fmt("max abs err h=1e-3: %.3e (tol 1e-6); ratio h=2e-3/h=1e-3: %.3f", e1, ratio)};
}

Outcome norm_choi_equivalence() {
  int disagreements = 0;
  int contractive = 0;
  for (int i = 0; i < 200; ++i) {
    auto rng = sample_stream(0xacce97ULL, static_cast<std::uint64_t>(i));
    const Eigen::Index n = 1 + i % 3;
    // Complex Ginibre scaled so that norms straddle 1.
    std::normal_distribution<double> g(0.0, std::sqrt(0.5 / static_cast<double>(n)));
    Matrix a(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) a(r, c) = Complex(g(rng), g(rng));
    }
    const bool by_choi = choi(a).min_eigenvalue() >= -1e-10;
    const bool by_sampling = is_positive_map(a, 500);
    const bool by_norm = operator_norm(a) <= 1.0 + 1e-10;
    contractive += by_norm ? 1 : 0;
    if (by_choi != by_norm || by_sampling != by_norm) ++disagreements;
  }
  return {disagreements == 0,
          fmt("200 draws (%d contractive): %d disagreements", contractive, disagreements)};
}

struct SweepCase {
  double gamma;
  double lambda;
};

const std::vector<SweepCase> kSweep = {{0.1, 0.5}, {0.1, 1.0}, {0.1, 2.0}, {1.0, 0.5}, {1.0, 1.0},
                                       {1.0, 2.0}, {8.0, 0.5}, {8.0, 1.0}, {8.0, 2.0}};

Outcome divisibility_consistency() {
  bool ok = true;
  std::string detail;
  for (const auto& c : kSweep) {
    const ModelSpec spec = qubit_model(0.0, FormFactor::lorentzian(c.gamma, c.lambda));
    const SurvivalOperator a = solve_survival(spec, 10.0, 1e-3);
    const DivisibilityReport rep = classify(a);
    bool flags_equal = true;
    for (const auto& s : rep.steps) {
      if (!s.excluded && s.monotone != s.step_cp) flags_equal = false;
    }
    const bool under = 2.0 * c.gamma * c.lambda > c.lambda * c.lambda;
    const double t_zero = gsb_test::pseudomode_first_zero(c.gamma, c.lambda);
    bool case_ok = flags_equal;
    if (under) {
      // The norm first grows right after |a| touches zero.
      case_ok = case_ok && !rep.p_divisible && rep.first_violation_time &&
                std::abs(*rep.first_violation_time - t_zero) <= 2e-3;
    } else {
      case_ok = case_ok && rep.p_divisible && rep.cp_divisible;
    }
    ok = ok && case_ok;
    if (!case_ok || under) {
      detail += fmt(" (g=%g,l=%g:%s t*=%.4f oracle %.4f)", c.gamma, c.lambda, case_ok ? "ok" : "BAD",
                    rep.first_violation_time.value_or(-1.0), t_zero);
    }
  }
  return {ok, "flags agree on all 9 cases; underdamped first violations" + detail};
}

Outcome semigroup_uniqueness() {
  ModelSpec flat_qubit = qubit_model(0.3, FormFactor::flat(1.0));
  ModelSpec flat_pair;
  flat_pair.h_excited = Matrix{{0.0, 0.2}, {0.2, 0.5}};
  flat_pair.betas = {Vector{{1.0, 0.5}}, Vector{{0.0, Complex(0.0, 1.0)}}};
  flat_pair.form_factors = {FormFactor::flat(1.0), FormFactor::flat(0.4)};
  const double flat_res = std::max(semigroup_residual(closed_form_flat(flat_qubit, 4.0, 1e-3)),
                                   semigroup_residual(closed_form_flat(flat_pair, 4.0, 1e-3)));
  double min_nonflat = 1e300;
  for (const auto& c : kSweep) {
    const ModelSpec spec = qubit_model(0.0, FormFactor::lorentzian(c.gamma, c.lambda));
    min_nonflat = std::min(min_nonflat, semigroup_residual(solve_survival(spec, 4.0, 1e-3)));
  }
  return {flat_res <= 1e-10 && min_nonflat > 1e-4,
          fmt("flat residual %.3e (tol 1e-10); smallest non-flat residual %.3e (> 1e-4)", flat_res,
              min_nonflat)};
}

std::vector<Refinement> ladder() { return {{10.0, 200}, {20.0, 400}, {40.0, 800}}; }

// Max over final probes of the gap for each (X0, Y0) pair, then over pairs.
double worst_pair_gap(const SweepPoint& p, std::size_t probes) {
  double worst = 0.0;
  for (std::size_t pair = 0; pair * probes < p.gaps.size(); ++pair) {
    for (std::size_t q = 0; q < probes; ++q) worst = std::max(worst, p.gaps[pair * probes + q]);
  }
  return worst;
}

Outcome regression_convergence() {
  const ModelSpec qubit = qubit_model(0.0, FormFactor::flat(1.0));
  Vector plus(2);
  plus << 1.0, 1.0;
  plus /= std::sqrt(2.0);
  const Matrix rho = plus * plus.adjoint();
  const auto corrs = matrix_unit_correlators(rho, 1.0, 2.0);
  const auto steps = ladder();
  const RegressionReport rep = convergence_sweep(qubit, corrs, steps, 0.05, 2);
  std::vector<double> gaps;
  for (const auto& p : rep.sweep) gaps.push_back(worst_pair_gap(p, 4));

  ModelSpec pair;
  pair.h_excited = Matrix{{0.0, 0.2}, {0.2, 0.5}};
  pair.betas = {Vector{{1.0, 0.5}}};
  pair.form_factors = {FormFactor::flat(1.0)};
  Vector psi = Vector::Zero(3);
  psi << 1.0, 0.0, 1.0;
  psi /= std::sqrt(2.0);
  Matrix lower = Matrix::Zero(3, 3);
  lower(2, 0) = 1.0;  // |g><e_0|
  const Matrix id = Matrix::Identity(3, 3);
  const CorrelationSpec rep_corr{{1.0, 2.0}, {lower, lower.adjoint()}, {id, id}, psi * psi.adjoint()};
  const RegressionReport rep2 =
      convergence_sweep(pair, std::span<const CorrelationSpec>(&rep_corr, 1), steps, 0.05, 2);
  std::vector<double> gaps2;
  for (const auto& p : rep2.sweep) gaps2.push_back(p.max_gap);

  const bool ok1 = strictly_decreasing(gaps) && gaps.back() <= 3e-2;
  const bool ok2 = strictly_decreasing(gaps2) && gaps2.back() <= 3e-2;
  return {ok1 && ok2, fmt("qubit gaps W=10,20,40: %.3e %.3e %.3e; n=2 gaps: %.3e %.3e %.3e (tol 3e-2)",
                          gaps[0], gaps[1], gaps[2], gaps2[0], gaps2[1], gaps2[2])};
}

Outcome two_photon_identities() {
  const ModelSpec qubit = qubit_model(0.0, FormFactor::flat(1.0));
  std::vector<double> overlaps;
  double worst_identity = 0.0;
  for (const auto& r : ladder()) {
    const DiscretizedBath bath = discretize_bath(qubit, r.half_bandwidth, r.modes);
    const TwoPhotonReport rep = two_photon_checks(qubit, bath, 1.0, 2.0);
    overlaps.push_back(rep.overlap_modulus);
    worst_identity = std::max(worst_identity,
                              std::abs(rep.two_photon_norm_direct - rep.two_photon_norm_permanent));
  }
  const bool ok = overlaps[1] <= 5e-2 && strictly_decreasing(overlaps) && worst_identity <= 1e-8;
  return {ok, fmt("overlap W=10,20,40: %.3e %.3e %.3e (tol 5e-2 at W=20); two-photon identity gap %.3e",
                  overlaps[0], overlaps[1], overlaps[2], worst_identity)};
}

Outcome ground_state_exact() {
  const ModelSpec qubit = qubit_model(0.0, FormFactor::flat(1.0));
  Matrix rho = Matrix::Zero(2, 2);
  rho(1, 1) = 1.0;
  const auto corrs = matrix_unit_correlators(rho, 1.0, 2.0);
  double worst = 0.0;
  for (const Refinement r : {Refinement{4.0, 16}, Refinement{10.0, 200}, Refinement{20.0, 400}}) {
    const DiscretizedBath bath = discretize_bath(qubit, r.half_bandwidth, r.modes);
    const SurvivalOperator a = extract_survival(qubit, bath, 2.0, 0.05);
    worst = std::max(worst, regression_gap(qubit, bath, a, corrs).max_gap);
  }
  return {worst <= 1e-9, fmt("max gap over 64 correlators and 3 baths: %.3e (tol 1e-9)", worst)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"flat-exponential-law", flat_exponential_law},
      {"volterra-accuracy", volterra_accuracy},
      {"norm-choi-equivalence", norm_choi_equivalence},
      {"divisibility-consistency", divisibility_consistency},
      {"semigroup-uniqueness", semigroup_uniqueness},
      {"regression-convergence", regression_convergence},
      {"two-photon-identities", two_photon_identities},
      {"ground-state-exact", ground_state_exact},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
