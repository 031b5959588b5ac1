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
#include <vector>

#include "gsb/linalg.hpp"
#include "gsb/spectral.hpp"

namespace gsb {

enum class Provenance { Volterra, ClosedFormFlat, FockExtracted, External };

const char* to_string(Provenance p) noexcept;

/// Time-sampled survival operator A(t_k) on a uniform grid. A(t) maps the
/// initial excited-sector amplitude to the excited-sector amplitude at t and
/// is the only parameter of the reduced dynamics.
class SurvivalOperator {
 public:
  SurvivalOperator(TimeGrid grid, std::vector<Matrix> samples, Provenance provenance);

  const TimeGrid& grid() const noexcept { return grid_; }
  Eigen::Index dim() const noexcept { return samples_.front().rows(); }
  std::size_t size() const noexcept { return samples_.size(); }
  Provenance provenance() const noexcept { return provenance_; }

  const Matrix& at(std::size_t k) const { return samples_.at(k); }
  const std::vector<Matrix>& samples() const noexcept { return samples_; }

  /// Sample at time t; throws TimeNotOnGrid when t is not a grid point.
  const Matrix& at_time(double t) const;

 private:
  TimeGrid grid_;
  std::vector<Matrix> samples_;
  Provenance provenance_;
};

struct VolterraOptions {
  /// Reject steps with h * ||G(0)||_op above this bound.
  double stability_limit = 0.1;
  bool enforce_stability = true;
};

/// Solves i A'(t) = H_e A(t) + int_0^t G(t - s) A(s) ds, A(0) = 1, with an
/// explicit Euler predictor and a trapezoidal (Heun) corrector. Both memory
/// sums use the trapezoidal rule, so the scheme is second order in h.
SurvivalOperator solve_survival(const ModelSpec& spec, double horizon, double step,
                                const VolterraOptions& options = {});

/// A(t) = exp(-(i H_e + Gamma / 2) t) for all-flat couplings.
SurvivalOperator closed_form_flat(const ModelSpec& spec, double horizon, double step);

/// Max of ||A(t + s) - A(t) A(s)||_op over a triangular sample of grid pairs
/// (at most ~64 points per axis).
double semigroup_residual(const SurvivalOperator& a);

struct GKLSGenerator {
  Matrix h_eff;   // renormalized excited-sector Hamiltonian
  Matrix gamma;   // dissipation operator sum_l gamma_l |beta_l><beta_l|
  std::vector<Vector> jump_vectors;  // sqrt(gamma_l) beta_l

  int rank(double tol = 1e-10) const { return psd_rank(gamma, tol); }

  /// -(i H_eff + Gamma / 2), the generator of A(t).
  Matrix excited_generator() const;

  /// Lindblad superoperator on (n+1)x(n+1) matrices in column-stacking
  /// vectorization; jump operators |g><beta_l|.
  Matrix superoperator() const;
};

GKLSGenerator gkls_generator(const ModelSpec& spec);

/// CSV: a comment line carrying n and provenance, a column header, then one
/// row per grid point with (Re, Im) of every entry in row-major order.
void write_survival_csv(std::ostream& os, const SurvivalOperator& a);

}  // namespace gsb
