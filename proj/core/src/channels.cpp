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
#include "gsb/channels.hpp"

#include <cmath>

#include "gsb/error.hpp"

namespace gsb {

DensityBlock DensityBlock::from_matrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw Error(ErrorKind::InvalidArgument, "density block needs a square matrix of size >= 2");
  }
  const auto n = m.rows() - 1;
  return DensityBlock{m.topLeftCorner(n, n), m.topRightCorner(n, 1), m.bottomLeftCorner(1, n),
                      m(n, n)};
}

Matrix DensityBlock::to_matrix() const {
  const auto n = excited.rows();
  Matrix m(n + 1, n + 1);
  m.topLeftCorner(n, n) = excited;
  m.topRightCorner(n, 1) = upper;
  m.bottomLeftCorner(1, n) = lower;
  m(n, n) = ground;
  return m;
}

DensityBlock apply_channel(const Matrix& a, const DensityBlock& rho) {
  if (a.rows() != rho.excited.rows()) {
    throw Error(ErrorKind::InvalidArgument, "survival operator and state dimensions differ");
  }
  const auto n = a.rows();
  const Matrix defect = Matrix::Identity(n, n) - a.adjoint() * a;
  return DensityBlock{a * rho.excited * a.adjoint(), a * rho.upper, rho.lower * a.adjoint(),
                      rho.ground + (defect * rho.excited).trace()};
}

Matrix apply_channel(const Matrix& a, const Matrix& rho) {
  return apply_channel(a, DensityBlock::from_matrix(rho)).to_matrix();
}

Matrix channel_superoperator(const Matrix& a) {
  const auto d = a.rows() + 1;
  Matrix s(d * d, d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      Matrix unit = Matrix::Zero(d, d);
      unit(i, j) = 1.0;
      const Matrix out = apply_channel(a, unit);
      s.col(i + j * d) = Eigen::Map<const Vector>(out.data(), d * d);
    }
  }
  return s;
}

std::vector<Matrix> kraus_set(const Matrix& a) {
  const auto n = a.rows();
  if (operator_norm(a) > 1.0 + 1e-10) {
    throw Error(ErrorKind::NotContractive, "||A||_op > 1: no Kraus representation exists");
  }
  std::vector<Matrix> ops;
  Matrix k0 = Matrix::Zero(n + 1, n + 1);
  k0.topLeftCorner(n, n) = a;
  k0(n, n) = 1.0;
  ops.push_back(std::move(k0));

  const Matrix defect = Matrix::Identity(n, n) - a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (defect + defect.adjoint()));
  for (Eigen::Index l = 0; l < n; ++l) {
    const double mu = es.eigenvalues()(l);
    if (mu <= 1e-14) continue;
    Matrix kl = Matrix::Zero(n + 1, n + 1);
    kl.row(n).head(n) = std::sqrt(mu) * es.eigenvectors().col(l).adjoint();
    ops.push_back(std::move(kl));
  }
  return ops;
}

namespace {

ChoiMatrix finish_choi(Matrix m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return ChoiMatrix{std::move(m), es.eigenvalues()};
}

}  // namespace

ChoiMatrix choi(const Matrix& a) {
  const auto d = a.rows() + 1;
  Matrix c = Matrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      Matrix unit = Matrix::Zero(d, d);
      unit(i, j) = 1.0;
      c.block(i * d, j * d, d, d) = apply_channel(a, unit);
    }
  }
  return finish_choi(std::move(c));
}

ChoiMatrix choi_from_kraus(std::span<const Matrix> kraus) {
  if (kraus.empty()) throw Error(ErrorKind::InvalidArgument, "empty Kraus set");
  const auto d = kraus.front().rows();
  Matrix c = Matrix::Zero(d * d, d * d);
  for (const auto& k : kraus) {
    // |K>> = sum_i |i> (x) K|i>
    Vector v(d * d);
    for (Eigen::Index i = 0; i < d; ++i) v.segment(i * d, d) = k.col(i);
    c += v * v.adjoint();
  }
  return finish_choi(std::move(c));
}

bool is_cp(const Matrix& a, double tol) { return choi(a).min_eigenvalue() >= -tol; }

bool is_positive_map(const Matrix& a, int samples, std::uint64_t seed, double tol) {
  const auto d = a.rows() + 1;
  for (int s = 0; s < samples; ++s) {
    auto rng = sample_stream(seed, static_cast<std::uint64_t>(s));
    const Vector psi = haar_state(d, rng);
    const Matrix out = apply_channel(a, Matrix(psi * psi.adjoint()));
    if (hermitian_eigenvalues(out)(0) < -tol) return false;
  }
  return true;
}

Matrix propagator(const Matrix& a_t, const Matrix& a_s) {
  Eigen::JacobiSVD<Matrix> svd(a_s, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smin > 1e-12 * std::max(1.0, smax))) {
    throw Error(ErrorKind::SingularSurvival, "A(s) is numerically singular (sigma_min = " +
                                                 std::to_string(smin) + ")");
  }
  return a_t * svd.solve(Matrix::Identity(a_s.rows(), a_s.cols()));
}

Matrix propagator(const SurvivalOperator& a, double s, double t) {
  if (t < s) throw Error(ErrorKind::InvalidArgument, "propagator requires t >= s");
  return propagator(a.at_time(t), a.at_time(s));
}

}  // namespace gsb
