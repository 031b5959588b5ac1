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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gsb/dynamics.hpp"
#include "gsb/fock.hpp"
#include "gsb/spectral.hpp"

namespace gsb {

/// Multi-time correlator Tr[E_m U ... E_0 U_{t_0}(rho (x) |vac><vac|)] with
/// E_k(A) = X_k A Y_k. Times are absolute and strictly increasing.
struct CorrelationSpec {
  std::vector<double> times;
  std::vector<Matrix> x_ops;
  std::vector<Matrix> y_ops;
  Matrix rho;

  std::size_t insertions() const noexcept { return times.size(); }
  /// Throws InvalidArgument on inconsistent sizes, unordered times or an
  /// invalid initial state.
  void validate(Eigen::Index system_dim) const;
  /// Excitation cap that keeps every intermediate insertion inside the
  /// truncated space: one per intermediate insertion plus one.
  int required_excitations() const noexcept { return static_cast<int>(times.size()); }
};

/// Full-model side, evaluated on the discretized bath by joint evolution of
/// pure components of rho on the ket and bra side.
Complex lhs_correlation(const FockModel& model, const CorrelationSpec& corr,
                        const EvolveOptions& options = {});
/// Batch version sharing evolved intermediate states between correlators
/// with common insertion prefixes; all entries must share times and rho.
std::vector<Complex> lhs_correlations(const FockModel& model, std::span<const CorrelationSpec> corrs,
                                      const EvolveOptions& options = {});

/// Reduced side: Tr[E_m L_{t_m - t_{m-1}} ... E_0 L_{t_0}(rho)], with L applied
/// to non-Hermitian intermediates by linearity. Throws TimeNotOnGrid.
Complex rhs_correlation(const SurvivalOperator& a, const CorrelationSpec& corr);

struct SweepPoint {
  double half_bandwidth = 0.0;
  int modes = 0;
  int n_max = 0;
  std::vector<double> gaps;  // one per correlator
  double max_gap = 0.0;
};

struct RegressionReport {
  std::vector<Complex> lhs;
  std::vector<Complex> rhs;
  std::vector<double> gaps;
  double max_gap = 0.0;
  double half_bandwidth = 0.0;
  int modes = 0;
  int n_max = 0;
  double step = 0.0;
  std::vector<SweepPoint> sweep;
};

/// Gap between the full-model and reduced sides on one discretized bath.
/// `n_max` <= 0 selects the smallest cap that the correlators need.
RegressionReport regression_gap(const ModelSpec& spec, const DiscretizedBath& bath,
                                const SurvivalOperator& a, std::span<const CorrelationSpec> corrs,
                                int n_max = 0);

struct Refinement {
  double half_bandwidth = 0.0;
  int modes = 0;
};

/// Re-runs the gap over a ladder of bath refinements. The reduced side uses
/// the survival operator extracted from the same discretized bath with grid
/// step `step`, so the gap isolates the failure of regression itself.
/// Refinements are evaluated on up to `threads` workers.
RegressionReport convergence_sweep(const ModelSpec& spec, std::span<const CorrelationSpec> corrs,
                                   std::span<const Refinement> refinements, double step,
                                   int n_max = 0, unsigned threads = 1);

/// Diagnostics of the single-photon profiles the two-time proof relies on.
struct TwoPhotonReport {
  double overlap_modulus = 0.0;        // |<xi_{t1,t0}, xi_{t1-t0}>|
  double two_photon_norm_direct = 0.0; // ||b^dag(xi_{t1,t0}) b^dag(xi_{t1-t0})|vac>||^2 in Fock space
  double two_photon_norm_permanent = 0.0;  // ||phi||^2 ||chi||^2 + |<phi,chi>|^2
  double product_of_norms = 0.0;       // ||xi_{t1-t0}||^2 ||xi_{t0}||^2
  double norm_identity_gap = 0.0;      // |permanent - product|
  double xi_t0_norm = 0.0;
  double xi_gap_norm = 0.0;
};

/// Profiles come from evolving |e_level, vac> on the discretized bath.
TwoPhotonReport two_photon_checks(const ModelSpec& spec, const DiscretizedBath& bath,
                                        double t0, double t1, Eigen::Index level = 0,
                                        const EvolveOptions& options = {});

/// Matrix units |i><j| on the (n+1)-level system, row-major (i, j) order.
std::vector<Matrix> matrix_units(Eigen::Index dim);

/// Two-time correlators at (t0, t1): (X0, Y0) over all matrix-unit pairs and
/// final insertions (X1, Y1) = (|a><b|, 1) over all matrix units, grouped so
/// that entry p * dim^2 + q probes pair p with final unit q.
std::vector<CorrelationSpec> matrix_unit_correlators(const Matrix& rho, double t0, double t1);

std::string report_to_json(const RegressionReport& report);
void write_sweep_csv(std::ostream& os, const RegressionReport& report);
std::string report_to_json(const TwoPhotonReport& report);

}  // namespace gsb
