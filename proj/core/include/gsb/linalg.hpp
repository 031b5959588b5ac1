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

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace gsb {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RowVector = Eigen::RowVectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Largest singular value.
double operator_norm(const Matrix& a);
double smallest_singular_value(const Matrix& a);

/// max_ij |a_ij - conj(a_ji)|
double hermiticity_defect(const Matrix& a);

/// Eigenvalues of the Hermitian part (a + a^dagger)/2, ascending.
RealVector hermitian_eigenvalues(const Matrix& a);

/// Sum of singular values.
double trace_norm(const Matrix& a);

Matrix expm(const Matrix& a);

/// Numerical rank of a PSD matrix: eigenvalues above tol * max(1, largest).
int psd_rank(const Matrix& a, double tol = 1e-10);

/// Independent deterministic stream for sample `index` under `seed`, so that
/// sampled results do not depend on evaluation order.
std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t index);

/// Haar-distributed unit vector (normalized complex Gaussian).
Vector haar_state(Eigen::Index dim, std::mt19937_64& rng);

/// Gaussian unitary ensemble sample, unit variance off-diagonal entries.
Matrix gue_matrix(Eigen::Index dim, std::mt19937_64& rng);

}  // namespace gsb
