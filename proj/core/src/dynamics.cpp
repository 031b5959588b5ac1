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
#include "gsb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "gsb/error.hpp"

namespace gsb {

const char* to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::Volterra: return "volterra";
    case Provenance::ClosedFormFlat: return "closed_form_flat";
    case Provenance::FockExtracted: return "fock_extracted";
    case Provenance::External: return "external";
  }
  return "unknown";
}

SurvivalOperator::SurvivalOperator(TimeGrid grid, std::vector<Matrix> samples,
                                   Provenance provenance)
    : grid_(grid), samples_(std::move(samples)), provenance_(provenance) {
  if (samples_.size() != grid_.size()) {
    throw Error(ErrorKind::InvalidArgument, "survival samples do not match the grid");
  }
  const auto n = samples_.front().rows();
  for (const auto& s : samples_) {
    if (s.rows() != n || s.cols() != n) {
      throw Error(ErrorKind::InvalidArgument, "survival samples must be square and equal-sized");
    }
  }
}

const Matrix& SurvivalOperator::at_time(double t) const {
  const auto k = grid_.index_of(t);
  if (!k) throw Error(ErrorKind::TimeNotOnGrid, "time " + std::to_string(t) + " is not a grid point");
  return samples_[*k];
}

namespace {

// Dense n x n complex blocks stored contiguously, column-major like Eigen.
using Block = Eigen::Map<const Matrix>;

// out += w * a * b for n x n column-major blocks.
inline void gemm_acc(Complex* out, const Complex* a, const Complex* b, Complex w, Eigen::Index n) {
  if (n == 1) {
    out[0] += w * a[0] * b[0];
    return;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const Complex bkj = w * b[k + j * n];
      const Complex* acol = a + k * n;
      Complex* ocol = out + j * n;
      for (Eigen::Index i = 0; i < n; ++i) ocol[i] += acol[i] * bkj;
    }
  }
}

}  // namespace

SurvivalOperator solve_survival(const ModelSpec& spec, double horizon, double step,
                                const VolterraOptions& options) {
  spec.validate();
  if (spec.any_flat()) {
    throw Error(ErrorKind::FlatKernelNotSampleable,
                "flat coupling has a delta kernel; use closed_form_flat");
  }
  const TimeGrid grid = TimeGrid::uniform(horizon, step);
  const MemoryKernel kernel = eval_kernel(spec, grid);
  const double g0 = operator_norm(kernel.samples.front());
  if (options.enforce_stability && step * g0 > options.stability_limit) {
    throw Error(ErrorKind::StepTooCoarse,
                "h * ||G(0)|| = " + std::to_string(step * g0) + " exceeds " +
                    std::to_string(options.stability_limit));
  }

  const Eigen::Index n = spec.levels();
  const auto nn = static_cast<std::size_t>(n * n);
  const std::size_t steps = grid.intervals;
  const double h = step;

  std::vector<Complex> g(kernel.samples.size() * nn);
  for (std::size_t k = 0; k < kernel.samples.size(); ++k) {
    std::copy(kernel.samples[k].data(), kernel.samples[k].data() + nn, g.begin() + k * nn);
  }
  const Matrix& hmat = spec.h_excited;

  std::vector<Matrix> a(steps + 1, Matrix(n, n));
  a[0].setIdentity();
  std::vector<Complex> a_flat((steps + 1) * nn);
  std::copy(a[0].data(), a[0].data() + nn, a_flat.begin());

  auto memory_tail = [&](std::size_t k_next) {
    // h [ G(t_k) A_0 / 2 + sum_{j=1}^{k-1} G(t_k - t_j) A_j ] for k = k_next
    Matrix acc = Matrix::Zero(n, n);
    Complex* out = acc.data();
    gemm_acc(out, &g[k_next * nn], &a_flat[0], 0.5 * h, n);
    for (std::size_t j = 1; j < k_next; ++j) {
      gemm_acc(out, &g[(k_next - j) * nn], &a_flat[j * nn], h, n);
    }
    return acc;
  };
  const Block g_zero(&g[0], n, n);

  Matrix memory = Matrix::Zero(n, n);  // trapezoidal memory integral at t_k
  Matrix rate = -kI * (hmat * a[0] + memory);
  for (std::size_t k = 0; k < steps; ++k) {
    const Matrix tail = memory_tail(k + 1);
    const Matrix pred = a[k] + h * rate;
    const Matrix memory_pred = tail + 0.5 * h * (g_zero * pred);
    const Matrix rate_pred = -kI * (hmat * pred + memory_pred);
    a[k + 1] = a[k] + 0.5 * h * (rate + rate_pred);
    std::copy(a[k + 1].data(), a[k + 1].data() + nn, a_flat.begin() + (k + 1) * nn);
    memory = tail + 0.5 * h * (g_zero * a[k + 1]);
    rate = -kI * (hmat * a[k + 1] + memory);
  }
  return SurvivalOperator(grid, std::move(a), Provenance::Volterra);
}

GKLSGenerator gkls_generator(const ModelSpec& spec) {
  spec.validate();
  if (!spec.all_flat()) {
    if (spec.any_flat()) {
      throw Error(ErrorKind::MixedKinds, "some but not all form factors are flat");
    }
    throw Error(ErrorKind::NotFlatCoupling, "a GKLS generator exists only for flat coupling");
  }
  const auto n = spec.levels();
  GKLSGenerator gen;
  gen.h_eff = spec.h_excited;
  gen.gamma = Matrix::Zero(n, n);
  for (std::size_t l = 0; l < spec.channels(); ++l) {
    Vector v = std::sqrt(spec.form_factors[l].gamma()) * spec.betas[l];
    gen.gamma += v * v.adjoint();
    gen.jump_vectors.push_back(std::move(v));
  }
  return gen;
}

Matrix GKLSGenerator::excited_generator() const { return -(kI * h_eff + 0.5 * gamma); }

Matrix GKLSGenerator::superoperator() const {
  const auto n = h_eff.rows();
  const auto d = n + 1;
  Matrix hs = Matrix::Zero(d, d);
  hs.topLeftCorner(n, n) = h_eff;
  const Matrix id = Matrix::Identity(d, d);
  // vec(A X B) = (B^T kron A) vec(X)
  auto kron = [](const Matrix& x, const Matrix& y) {
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
  };
  Matrix l = -kI * (kron(id, hs) - kron(hs.transpose(), id));
  for (const auto& v : jump_vectors) {
    Matrix jump = Matrix::Zero(d, d);
    jump.row(n).head(n) = v.adjoint();
    const Matrix jj = jump.adjoint() * jump;
    l += kron(jump.conjugate(), jump) - 0.5 * kron(id, jj) - 0.5 * kron(jj.transpose(), id);
  }
  return l;
}

SurvivalOperator closed_form_flat(const ModelSpec& spec, double horizon, double step) {
  const GKLSGenerator gen = gkls_generator(spec);
  const TimeGrid grid = TimeGrid::uniform(horizon, step);
  const Matrix z = gen.excited_generator();
  std::vector<Matrix> a;
  a.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k == 0) {
      a.push_back(Matrix::Identity(z.rows(), z.cols()));
    } else {
      a.push_back(expm(z * grid.time(k)));
    }
  }
  return SurvivalOperator(grid, std::move(a), Provenance::ClosedFormFlat);
}

double semigroup_residual(const SurvivalOperator& a) {
  const std::size_t last = a.grid().intervals;
  if (last < 2) return 0.0;
  const std::size_t stride = std::max<std::size_t>(1, last / 64);
  double worst = 0.0;
  for (std::size_t i = stride; i < last; i += stride) {
    for (std::size_t j = stride; i + j <= last; j += stride) {
      worst = std::max(worst, operator_norm(a.at(i + j) - a.at(i) * a.at(j)));
    }
  }
  return worst;
}

void write_survival_csv(std::ostream& os, const SurvivalOperator& a) {
  const auto n = a.dim();
  os << "# gsb survival n=" << n << " provenance=" << to_string(a.provenance()) << '\n';
  os << 't';
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      os << ",re_A" << i + 1 << '_' << j + 1 << ",im_A" << i + 1 << '_' << j + 1;
    }
  }
  os << '\n';
  char buf[64];
  for (std::size_t k = 0; k < a.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.10g", a.grid().time(k));
    os << buf;
    const Matrix& m = a.at(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g", m(i, j).real(), m(i, j).imag());
        os << buf;
      }
    }
    os << '\n';
  }
}

}  // namespace gsb
