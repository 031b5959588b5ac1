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
#include <span>
#include <vector>

#include "gsb/dynamics.hpp"
#include "gsb/linalg.hpp"

namespace gsb {

// System ordering used throughout: excited levels 0..n-1, ground level n.

/// Block splitting of an (n+1)x(n+1) operator. The two coherence blocks are
/// held independently so the channel extends linearly to non-Hermitian inputs.
struct DensityBlock {
  Matrix excited;   // n x n
  Vector upper;     // excited-ground column |w>
  RowVector lower;  // ground-excited row <w'|
  Complex ground;

  static DensityBlock from_matrix(const Matrix& m);
  Matrix to_matrix() const;
  Complex trace() const { return excited.trace() + ground; }
};

/// (A rho_e A^dag, A w, w' A^dag, rho_g + Tr[(1 - A^dag A) rho_e]).
DensityBlock apply_channel(const Matrix& a, const DensityBlock& rho);
Matrix apply_channel(const Matrix& a, const Matrix& rho);

/// Matrix of the channel acting on column-stacked vec(rho).
Matrix channel_superoperator(const Matrix& a);

/// K0 = A (+) 1 and rank-one lowering operators sqrt(mu) |g><v| from the
/// spectral decomposition of 1 - A^dag A. Throws NotContractive when
/// ||A||_op > 1 + 1e-10.
std::vector<Matrix> kraus_set(const Matrix& a);

/// Unnormalized Choi matrix sum_ij |i><j| (x) L(|i><j|), trace n + 1.
struct ChoiMatrix {
  Matrix matrix;
  RealVector eigenvalues;  // ascending

  double min_eigenvalue() const { return eigenvalues(0); }
};

ChoiMatrix choi(const Matrix& a);
ChoiMatrix choi_from_kraus(std::span<const Matrix> kraus);

bool is_cp(const Matrix& a, double tol = 1e-10);

inline constexpr int kDefaultPositivitySamples = 500;
inline constexpr std::uint64_t kDefaultPositivitySeed = 0x5eed'0001ULL;

/// Falsification test for positivity: applies the channel to `samples`
/// Haar-random pure states and reports false iff some output has an
/// eigenvalue below -tol.
bool is_positive_map(const Matrix& a, int samples = kDefaultPositivitySamples,
                     std::uint64_t seed = kDefaultPositivitySeed, double tol = 1e-10);

/// A(t, s) = A(t) A(s)^{-1}. Throws SingularSurvival when the smallest
/// singular value of A(s) is below 1e-12 * max(1, ||A(s)||).
Matrix propagator(const Matrix& a_t, const Matrix& a_s);
Matrix propagator(const SurvivalOperator& a, double s, double t);

/// Lazily evaluated reduced maps of a survival operator.
class ChannelFamily {
 public:
  explicit ChannelFamily(const SurvivalOperator& survival) : survival_(&survival) {}

  const SurvivalOperator& survival() const noexcept { return *survival_; }
  Matrix apply(std::size_t k, const Matrix& rho) const { return apply_channel(survival_->at(k), rho); }
  Matrix superoperator(std::size_t k) const { return channel_superoperator(survival_->at(k)); }
  ChoiMatrix choi(std::size_t k) const { return gsb::choi(survival_->at(k)); }
  std::vector<Matrix> kraus(std::size_t k) const { return kraus_set(survival_->at(k)); }

 private:
  const SurvivalOperator* survival_;
};

}  // namespace gsb
