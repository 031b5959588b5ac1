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

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "gsb/channels.hpp"
#include "gsb/error.hpp"
#include "gsb/regression.hpp"
#include "oracles.hpp"

using namespace gsb;

namespace {

Matrix unit(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  Matrix u = Matrix::Zero(d, d);
  u(i, j) = 1.0;
  return u;
}

Matrix sigma_x() { return unit(2, 0, 1) + unit(2, 1, 0); }

Matrix pure(Complex e, Complex g) {
  Vector v(2);
  v << e, g;
  v.normalize();
  return v * v.adjoint();
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

const ModelSpec kFlat = qubit_model(0.0, FormFactor::flat(1.0));

// Converged gap of the sigma-x correlator below, from the W = 40 run.
constexpr double kLorentzianPlateau = 0.066836;

}  // namespace

TEST_CASE("identity insertions reduce to the trace") {
  const DiscretizedBath bath = discretize_bath(kFlat, 5.0, 40);
  const SurvivalOperator a = extract_survival(kFlat, bath, 3.0, 0.5);
  const Matrix id = Matrix::Identity(2, 2);
  const FockModel model(kFlat, bath, 3);
  const CorrelationSpec single{{1.5}, {id}, {id}, pure(0.3, 0.7)};
  CHECK(std::abs(lhs_correlation(model, single) - 1.0) < 1e-12);
  CHECK(std::abs(rhs_correlation(a, single) - 1.0) < 1e-14);
  const CorrelationSpec three{{0.5, 1.5, 3.0}, {id, id, id}, {id, id, id}, pure(1.0, Complex(0.0, 1.0))};
  CHECK(regression_gap(kFlat, bath, a, std::span<const CorrelationSpec>(&three, 1)).max_gap <= 1e-10);
}

TEST_CASE("ground state correlators are exact at any discretization") {
  const DiscretizedBath bath = discretize_bath(kFlat, 3.0, 12);
  const SurvivalOperator a = extract_survival(kFlat, bath, 2.0, 0.25);
  const auto corrs = matrix_unit_correlators(pure(0.0, 1.0), 0.75, 2.0);
  const RegressionReport rep = regression_gap(kFlat, bath, a, corrs);
  CHECK(rep.max_gap <= 1e-9);
  CHECK(rep.n_max == 2);
  // and both sides equal Tr[L_{t1 - t0}(X |g><g| Y)] in closed form.
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const auto& c = corrs[i];
    const Matrix inner = c.x_ops[0] * pure(0.0, 1.0) * c.y_ops[0];
    const Complex expect = (c.x_ops[1] * apply_channel(a.at_time(1.25), inner) * c.y_ops[1]).trace();
    CHECK(std::abs(rep.rhs[i] - expect) < 1e-14);
  }
}

TEST_CASE("reduced side closed forms") {
  const SurvivalOperator flat = closed_form_flat(kFlat, 2.0, 0.5);
  const Matrix proj = unit(2, 0, 0);
  const CorrelationSpec c{{1.0, 2.0}, {proj, proj}, {proj, proj}, pure(1.0, 0.0)};
  CHECK(std::abs(rhs_correlation(flat, c) - std::exp(-2.0)) < 1e-14);
  CHECK(std::abs(std::exp(-2.0) - 0.13534) < 1e-5);

  // Coherence intermediate |e><g|: rhs = a(t0) a(t1 - t0) / 2 for rho = |+><+|.
  const ModelSpec lor = qubit_model(0.0, FormFactor::lorentzian(1.0, 1.0));
  const SurvivalOperator a = solve_survival(lor, 2.0, 1e-3);
  const Matrix id = Matrix::Identity(2, 2);
  const CorrelationSpec coh{{0.6, 2.0}, {proj, unit(2, 1, 0)}, {unit(2, 1, 1), id}, pure(1.0, 1.0)};
  const Complex structural = 0.5 * a.at_time(0.6)(0, 0) * a.at_time(1.4)(0, 0);
  CHECK(std::abs(rhs_correlation(a, coh) - structural) < 1e-14);
  const Complex oracle =
      0.5 * gsb_test::pseudomode_amplitude(0.6, 1.0, 1.0) * gsb_test::pseudomode_amplitude(1.4, 1.0, 1.0);
  CHECK(std::abs(rhs_correlation(a, coh) - oracle) < 1e-6);
  CHECK(kind_of([&] {
          (void)rhs_correlation(a, CorrelationSpec{{0.6005, 2.0}, {id, id}, {id, id}, pure(1.0, 0.0)});
        }) == ErrorKind::TimeNotOnGrid);
}

TEST_CASE("flat sigma-x correlators") {
  const Matrix sx = sigma_x(), id = Matrix::Identity(2, 2);
  const std::vector<Refinement> ladder{{10.0, 200}, {20.0, 400}, {40.0, 800}};
  // X = Y = sigma_x makes every insertion a unitary conjugation, so both
  // sides equal one identically.
  const CorrelationSpec conj{{1.0, 2.0}, {sx, sx}, {sx, sx}, pure(1.0, 0.0)};
  const RegressionReport trivial =
      convergence_sweep(kFlat, std::span<const CorrelationSpec>(&conj, 1), ladder, 0.05);
  for (const auto& p : trivial.sweep) CHECK(p.max_gap <= 1e-10);

  const CorrelationSpec c{{1.0, 2.0}, {sx, sx}, {id, id}, pure(1.0, 0.0)};
  const RegressionReport rep = convergence_sweep(kFlat, std::span<const CorrelationSpec>(&c, 1), ladder, 0.05, 0, 2);
  REQUIRE(rep.sweep.size() == 3);
  MESSAGE("flat sigma-x gaps: " << rep.sweep[0].max_gap << " " << rep.sweep[1].max_gap << " " << rep.sweep[2].max_gap);
  // lhs - rhs changes sign as W grows (a sin(W t) / W bandwidth term), so
  // only the envelope decays: W = 20 sits near a zero crossing.
  CHECK(rep.sweep[1].max_gap < 0.5 * rep.sweep[0].max_gap);
  CHECK(rep.sweep[2].max_gap < 0.25 * rep.sweep[0].max_gap);
  CHECK(rep.sweep[0].max_gap > 1e-6);
  CHECK(rep.sweep[2].max_gap < 3e-2);
  CHECK(rep.half_bandwidth == 40.0);
  // Thread count does not change the numbers.
  const RegressionReport serial =
      convergence_sweep(kFlat, std::span<const CorrelationSpec>(&c, 1), ladder, 0.05, 0, 1);
  CHECK(report_to_json(serial) == report_to_json(rep));
}

TEST_CASE("lorentzian regression gap reaches a nonzero plateau") {
  const ModelSpec lor = qubit_model(0.0, FormFactor::lorentzian(1.0, 1.0));
  const Matrix sx = sigma_x(), id = Matrix::Identity(2, 2);
  const CorrelationSpec c{{1.0, 2.0}, {sx, sx}, {id, id}, pure(1.0, 0.0)};
  const std::vector<Refinement> ladder{{10.0, 200}, {20.0, 400}, {40.0, 800}};
  const RegressionReport rep = convergence_sweep(lor, std::span<const CorrelationSpec>(&c, 1), ladder, 0.05);
  const double g10 = rep.sweep[0].max_gap, g20 = rep.sweep[1].max_gap, g40 = rep.sweep[2].max_gap;
  MESSAGE("lorentzian plateau gaps: " << g10 << " " << g20 << " " << g40);
  CHECK(std::max({g10, g20, g40}) - std::min({g10, g20, g40}) < 1e-4);
  CHECK(g40 > 1e-2);
  CHECK(g40 == doctest::Approx(kLorentzianPlateau).epsilon(1e-3));
}

TEST_CASE("mixed initial states split into pure components") {
  const DiscretizedBath bath = discretize_bath(kFlat, 4.0, 30);
  const FockModel model(kFlat, bath, 2);
  const Matrix sx = sigma_x();
  const Matrix r1 = pure(1.0, 0.0), r2 = pure(0.5, Complex(0.0, 1.0));
  auto value = [&](const Matrix& rho) {
    return lhs_correlation(model, CorrelationSpec{{0.5, 1.0}, {sx, unit(2, 1, 0)}, {unit(2, 0, 1), sx}, rho});
  };
  CHECK(std::abs(value(0.3 * r1 + 0.7 * r2) - (0.3 * value(r1) + 0.7 * value(r2))) < 1e-12);
}

TEST_CASE("correlator validation and truncation") {
  const Matrix id = Matrix::Identity(2, 2);
  CHECK(kind_of([&] { CorrelationSpec{{2.0, 1.0}, {id, id}, {id, id}, pure(1, 0)}.validate(2); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { CorrelationSpec{{1.0}, {id, id}, {id}, pure(1, 0)}.validate(2); }) ==
        ErrorKind::InvalidArgument);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK(kind_of([&] { CorrelationSpec{{1.0}, {id}, {id}, bad}.validate(2); }) == ErrorKind::InvalidArgument);
  CHECK(CorrelationSpec{{1.0, 2.0, 3.0}, {id, id, id}, {id, id, id}, pure(1, 0)}.required_excitations() == 3);

  const DiscretizedBath bath = discretize_bath(kFlat, 4.0, 30);
  const FockModel shallow(kFlat, bath, 1);
  const CorrelationSpec raise{{0.5, 1.0}, {unit(2, 0, 1), id}, {id, id}, pure(1.0, 1.0)};
  CHECK(kind_of([&] { (void)lhs_correlation(shallow, raise); }) == ErrorKind::TruncationOverflow);
}

TEST_CASE("matrix unit correlators") {
  CHECK(matrix_units(3).size() == 9);
  const auto corrs = matrix_unit_correlators(pure(1.0, 1.0), 1.0, 2.0);
  REQUIRE(corrs.size() == 64);
  // entry p * 4 + q pairs (X0, Y0) = (units[p / 4], units[p % 4]) with X1 = units[q].
  const auto units = matrix_units(2);
  const auto& c = corrs[9 * 4 + 3];
  CHECK(c.x_ops[0] == units[2]);
  CHECK(c.y_ops[0] == units[1]);
  CHECK(c.x_ops[1] == units[3]);
  CHECK(c.y_ops[1] == Matrix::Identity(2, 2));
}

TEST_CASE("two-photon identities") {
  std::vector<double> overlaps;
  for (const Refinement r : {Refinement{10.0, 200}, Refinement{20.0, 400}, Refinement{40.0, 800}}) {
    const TwoPhotonReport rep = two_photon_checks(kFlat, discretize_bath(kFlat, r.half_bandwidth, r.modes), 1.0, 2.0);
    overlaps.push_back(rep.overlap_modulus);
    CHECK(std::abs(rep.two_photon_norm_direct - rep.two_photon_norm_permanent) < 1e-8);
    CHECK(rep.xi_t0_norm * rep.xi_t0_norm == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(0.05));
  }
  CHECK(overlaps[1] <= 5e-2);
  CHECK(overlaps[2] < overlaps[1]);
  CHECK(overlaps[1] < overlaps[0]);

  const TwoPhotonReport same = two_photon_checks(kFlat, discretize_bath(kFlat, 10.0, 200), 1.0, 1.0);
  CHECK(same.overlap_modulus == 0.0);
  CHECK(same.norm_identity_gap == 0.0);
  CHECK(same.two_photon_norm_direct == 0.0);

  // Structured baths keep a finite overlap.
  const ModelSpec lor = qubit_model(0.0, FormFactor::lorentzian(1.0, 1.0));
  std::vector<double> lor_overlaps;
  for (const Refinement r : {Refinement{10.0, 200}, Refinement{20.0, 400}, Refinement{40.0, 800}}) {
    lor_overlaps.push_back(
        two_photon_checks(lor, discretize_bath(lor, r.half_bandwidth, r.modes), 1.0, 2.0).overlap_modulus);
  }
  MESSAGE("lorentzian overlaps: " << lor_overlaps[0] << " " << lor_overlaps[1] << " " << lor_overlaps[2]);
  CHECK(lor_overlaps[2] > 0.05);
  CHECK(std::abs(lor_overlaps[2] - lor_overlaps[1]) < 1e-2 * lor_overlaps[2]);
}

TEST_CASE("report serialization") {
  const DiscretizedBath bath = discretize_bath(kFlat, 4.0, 30);
  const SurvivalOperator a = extract_survival(kFlat, bath, 2.0, 0.5);
  const auto corrs = matrix_unit_correlators(pure(1.0, 1.0), 1.0, 2.0);
  const std::vector<Refinement> ladder{{4.0, 30}};
  const RegressionReport rep = convergence_sweep(kFlat, corrs, ladder, 0.5);
  const auto j = nlohmann::json::parse(report_to_json(rep));
  CHECK(j.at("gaps").size() == 64);
  CHECK(j.at("sweep").size() == 1);
  std::ostringstream os;
  write_sweep_csv(os, rep);
  CHECK(os.str().rfind("W,M,N_max,gap\n4,30,2,", 0) == 0);
}
