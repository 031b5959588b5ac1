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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>

#include "gsb/dynamics.hpp"
#include "gsb/linalg.hpp"
#include "gsb/spectral.hpp"

namespace gsb {

inline constexpr std::size_t kDefaultBasisCap = 500'000;

/// Truncated Fock basis of system (x) bath with total excitation <= n_max.
///
/// A basis state is a system level (excited 0..n-1, ground n) plus the
/// multiset of occupied bath modes, stored as a sorted list of mode indices.
/// Ordering: by excitation number, then system level, then occupation
/// pattern in ascending lexicographic order of the sorted mode list (so for
/// two modes 10 comes before 01).
class FockBasis {
 public:
  static FockBasis build(Eigen::Index excited_levels, std::size_t modes, int n_max,
                         std::size_t cap = kDefaultBasisCap);

  /// Closed-form count, sum over sectors of n C(M+N-2, N-1) + C(M+N-1, N).
  static double predicted_size(Eigen::Index excited_levels, std::size_t modes, int n_max);

  std::size_t size() const noexcept { return levels_.size(); }
  Eigen::Index excited_levels() const noexcept { return excited_levels_; }
  int ground_level() const noexcept { return static_cast<int>(excited_levels_); }
  std::size_t modes() const noexcept { return modes_; }
  int n_max() const noexcept { return n_max_; }

  int level(std::size_t i) const { return levels_[i]; }
  std::span<const std::uint32_t> occupied(std::size_t i) const {
    return {mode_data_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  int excitation(std::size_t i) const {
    return static_cast<int>(occupied(i).size()) + (level(i) < ground_level() ? 1 : 0);
  }

  /// Index of (level, sorted modes) if it is inside the truncated space.
  std::optional<std::size_t> find(int level, std::span<const std::uint32_t> sorted_modes) const;
  std::size_t vacuum(int level) const { return *find(level, {}); }

 private:
  std::optional<std::uint64_t> encode(int level, std::span<const std::uint32_t> modes) const;

  Eigen::Index excited_levels_ = 0;
  std::size_t modes_ = 0;
  int n_max_ = 0;
  int mode_bits_ = 0;
  int level_bits_ = 0;
  std::vector<int> levels_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> mode_data_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

struct JointState {
  Vector amplitudes;

  double norm() const { return amplitudes.norm(); }
};

/// H_e + sum_k omega_k n_k + sum_jk g_jk (|g><beta_j| b_jk^dagger + h.c.)
/// restricted to the truncated basis, with sqrt(occupation) factors.
struct SparseHamiltonian {
  Eigen::SparseMatrix<Complex, Eigen::RowMajor> matrix;
  double spectral_center = 0.0;  // Gershgorin interval [c - R, c + R]
  double spectral_radius = 0.0;
};

SparseHamiltonian build_hamiltonian(const ModelSpec& spec, const DiscretizedBath& bath,
                                    const FockBasis& basis);

struct EvolveOptions {
  /// Per-term cutoff on |J_k(R dt)| for the Chebyshev series.
  double term_tolerance = 1e-15;
  /// Allowed drift of the norm over one evolve call.
  double norm_drift = 1e-8;
  /// Largest R dt per Chebyshev chunk.
  double max_chunk = 60.0;
  int max_terms = 4000;
};

/// Chebyshev expansion of exp(-i H dt) for a fixed dt.
class ChebyshevPropagator {
 public:
  ChebyshevPropagator(const SparseHamiltonian& h, double dt, const EvolveOptions& options = {});

  Vector apply(const Vector& psi) const;
  std::size_t terms() const noexcept { return coefficients_.size(); }

 private:
  const SparseHamiltonian* h_;
  double dt_;
  std::vector<Complex> coefficients_;
};

/// psi(t) = exp(-i H t) psi0. Throws ConvergenceFailure when the series
/// needs more than max_terms terms or the norm drifts beyond the bound.
JointState evolve(const SparseHamiltonian& h, const JointState& psi0, double t,
                  const EvolveOptions& options = {});

/// (X (x) 1_B) psi. Throws TruncationOverflow when a nonzero amplitude would
/// land outside the truncated space.
JointState apply_system_operator(const FockBasis& basis, const Matrix& x, const JointState& psi);

/// <bra| (O (x) 1_B) |ket> without materializing O|ket>; components of O|ket>
/// outside the basis have zero overlap with bra and are skipped.
Complex system_matrix_element(const FockBasis& basis, const JointState& bra, const Matrix& op,
                              const JointState& ket);

/// Applies b^dagger(profile) = sum_m profile_m b_m^dagger.
JointState apply_creation(const FockBasis& basis, const Vector& profile, const JointState& psi);

/// Discretized model bundled with its basis and Hamiltonian.
class FockModel {
 public:
  FockModel(const ModelSpec& spec, const DiscretizedBath& bath, int n_max,
            std::size_t cap = kDefaultBasisCap);

  const ModelSpec& spec() const noexcept { return spec_; }
  const DiscretizedBath& bath() const noexcept { return bath_; }
  const FockBasis& basis() const noexcept { return basis_; }
  const SparseHamiltonian& hamiltonian() const noexcept { return hamiltonian_; }
  Eigen::Index levels() const noexcept { return spec_.levels(); }

  /// |system> (x) |vac> for an (n+1)-component system vector.
  JointState product_state(const Vector& system) const;
  JointState evolve(const JointState& psi, double t, const EvolveOptions& options = {}) const {
    return gsb::evolve(hamiltonian_, psi, t, options);
  }
  /// Amplitudes of |g> (x) b_m^dagger |vac>, one per bath mode.
  Vector photon_profile(const JointState& psi) const;
  /// Amplitudes of |e_l> (x) |vac>.
  Vector excited_amplitudes(const JointState& psi) const;

 private:
  ModelSpec spec_;
  DiscretizedBath bath_;
  FockBasis basis_;
  SparseHamiltonian hamiltonian_;
  std::vector<std::size_t> photon_index_;
};

/// Survival operator of the discretized model: column i is the excited part
/// of exp(-i H t)|e_i, vac>. Uses the single-excitation space only.
SurvivalOperator extract_survival(const ModelSpec& spec, const DiscretizedBath& bath,
                                  double horizon, double step, const EvolveOptions& options = {});

/// Textual snapshot: one "index,re,im" row per basis state.
void write_state_csv(std::ostream& os, const JointState& psi);

}  // namespace gsb
