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
#include "gsb/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <cstdio>
#include <ostream>

#include "gsb/error.hpp"

namespace gsb {

namespace {

double multisets(std::size_t modes, int size) {
  // C(modes + size - 1, size)
  if (size < 0) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= size; ++i) {
    c *= static_cast<double>(modes + static_cast<std::size_t>(i) - 1) / i;
  }
  return c;
}

// Non-decreasing sequences of length q over [0, modes) in lexicographic order.
template <class Visit>
void for_each_multiset(std::size_t modes, int q, Visit&& visit) {
  std::vector<std::uint32_t> cur(static_cast<std::size_t>(q), 0);
  if (q == 0) {
    visit(std::span<const std::uint32_t>{});
    return;
  }
  if (modes == 0) return;
  const auto top = static_cast<std::uint32_t>(modes - 1);
  while (true) {
    visit(std::span<const std::uint32_t>(cur));
    int i = q - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == top) --i;
    if (i < 0) return;
    const std::uint32_t v = cur[static_cast<std::size_t>(i)] + 1;
    for (auto j = static_cast<std::size_t>(i); j < cur.size(); ++j) cur[j] = v;
  }
}

// Bessel J_0..J_kmax(x) by Miller's backward recurrence, normalized with
// J_0 + 2 sum_k J_2k = 1.
std::vector<double> bessel_sequence(double x, int kmax) {
  std::vector<double> j(static_cast<std::size_t>(kmax) + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  int start = kmax + 20 + static_cast<int>(std::sqrt(40.0 * (kmax + 1)));
  if (start % 2) ++start;
  std::vector<double> b(static_cast<std::size_t>(start) + 2, 0.0);
  b[static_cast<std::size_t>(start)] = 1e-300;
  for (int k = start; k >= 1; --k) {
    const auto ku = static_cast<std::size_t>(k);
    b[ku - 1] = 2.0 * k / x * b[ku] - b[ku + 1];
    if (std::abs(b[ku - 1]) > 1e250) {
      for (std::size_t m = ku - 1; m <= static_cast<std::size_t>(start); ++m) b[m] *= 1e-250;
    }
  }
  double norm = b[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0 * b[static_cast<std::size_t>(k)];
  for (int k = 0; k <= kmax; ++k) j[static_cast<std::size_t>(k)] = b[static_cast<std::size_t>(k)] / norm;
  return j;
}

}  // namespace

double FockBasis::predicted_size(Eigen::Index excited_levels, std::size_t modes, int n_max) {
  double total = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    total += static_cast<double>(excited_levels) * multisets(modes, n - 1) + multisets(modes, n);
  }
  return total;
}

FockBasis FockBasis::build(Eigen::Index excited_levels, std::size_t modes, int n_max,
                           std::size_t cap) {
  if (excited_levels < 1) throw Error(ErrorKind::InvalidArgument, "need at least one excited level");
  if (n_max < 0) throw Error(ErrorKind::InvalidArgument, "excitation truncation must be >= 0");
  const double predicted = predicted_size(excited_levels, modes, n_max);
  if (predicted > static_cast<double>(cap)) {
    throw Error(ErrorKind::BasisTooLarge, "basis size " + std::to_string(predicted) +
                                              " exceeds cap " + std::to_string(cap));
  }

  FockBasis b;
  b.excited_levels_ = excited_levels;
  b.modes_ = modes;
  b.n_max_ = n_max;
  b.mode_bits_ = std::max(1, static_cast<int>(std::bit_width(modes)));
  b.level_bits_ = std::max(1, static_cast<int>(std::bit_width(static_cast<std::size_t>(excited_levels))));
  if (b.level_bits_ + n_max * b.mode_bits_ > 64) {
    throw Error(ErrorKind::BasisTooLarge, "occupation patterns do not fit the 64-bit state key");
  }
  const auto total = static_cast<std::size_t>(predicted);
  b.levels_.reserve(total);
  b.offsets_.reserve(total + 1);
  b.index_.reserve(total);

  const int ground = static_cast<int>(excited_levels);
  for (int n = 0; n <= n_max; ++n) {
    for (int level = 0; level <= ground; ++level) {
      const int q = n - (level < ground ? 1 : 0);
      if (q < 0) continue;
      for_each_multiset(modes, q, [&](std::span<const std::uint32_t> occ) {
        b.index_.emplace(*b.encode(level, occ), b.levels_.size());
        b.levels_.push_back(level);
        b.mode_data_.insert(b.mode_data_.end(), occ.begin(), occ.end());
        b.offsets_.push_back(b.mode_data_.size());
      });
    }
  }
  return b;
}

std::optional<std::uint64_t> FockBasis::encode(int level,
                                               std::span<const std::uint32_t> modes) const {
  if (static_cast<int>(modes.size()) > n_max_) return std::nullopt;
  std::uint64_t key = static_cast<std::uint64_t>(level);
  int shift = level_bits_;
  for (std::uint32_t m : modes) {
    key |= static_cast<std::uint64_t>(m + 1) << shift;
    shift += mode_bits_;
  }
  return key;
}

std::optional<std::size_t> FockBasis::find(int level,
                                           std::span<const std::uint32_t> sorted_modes) const {
  if (level < 0 || level > ground_level()) return std::nullopt;
  const int exc = static_cast<int>(sorted_modes.size()) + (level < ground_level() ? 1 : 0);
  if (exc > n_max_) return std::nullopt;
  const auto key = encode(level, sorted_modes);
  if (!key) return std::nullopt;
  const auto it = index_.find(*key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SparseHamiltonian build_hamiltonian(const ModelSpec& spec, const DiscretizedBath& bath,
                                    const FockBasis& basis) {
  spec.validate();
  if (bath.total_modes() != basis.modes()) {
    throw Error(ErrorKind::InvalidArgument, "bath and basis disagree on the mode count");
  }
  const int ground = basis.ground_level();
  const Matrix& he = spec.h_excited;
  const std::size_t modes = basis.modes();
  const auto per_channel = static_cast<std::size_t>(bath.modes_per_channel);

  std::vector<double> omega(modes), coupling(modes);
  for (std::size_t m = 0; m < modes; ++m) {
    omega[m] = bath.frequency(m);
    coupling[m] = bath.coupling(m);
  }

  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(basis.size() * 3);
  std::vector<std::uint32_t> scratch;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const int l = basis.level(i);
    const auto occ = basis.occupied(i);
    double diag = 0.0;
    for (std::uint32_t m : occ) diag += omega[m];
    if (l < ground) diag += he(l, l).real();
    trip.emplace_back(static_cast<int>(i), static_cast<int>(i), Complex(diag, 0.0));
    if (l == ground) continue;

    for (int lp = 0; lp < ground; ++lp) {
      if (lp == l || he(lp, l) == Complex(0.0, 0.0)) continue;
      const auto j = basis.find(lp, occ);
      trip.emplace_back(static_cast<int>(*j), static_cast<int>(i), he(lp, l));
    }
    // |g><beta_j| b_m^dagger: lowers the atom and emits into mode m.
    for (std::size_t m = 0; m < modes; ++m) {
      const Complex amp = coupling[m] * std::conj(bath.channels[m / per_channel].beta(l));
      if (amp == Complex(0.0, 0.0)) continue;
      scratch.assign(occ.begin(), occ.end());
      scratch.insert(std::upper_bound(scratch.begin(), scratch.end(), static_cast<std::uint32_t>(m)),
                     static_cast<std::uint32_t>(m));
      const auto j = basis.find(ground, scratch);
      if (!j) continue;
      const auto occupation = std::count(scratch.begin(), scratch.end(), static_cast<std::uint32_t>(m));
      const Complex v = amp * std::sqrt(static_cast<double>(occupation));
      trip.emplace_back(static_cast<int>(*j), static_cast<int>(i), v);
      trip.emplace_back(static_cast<int>(i), static_cast<int>(*j), std::conj(v));
    }
  }

  SparseHamiltonian h;
  const auto dim = static_cast<Eigen::Index>(basis.size());
  h.matrix.resize(dim, dim);
  h.matrix.setFromTriplets(trip.begin(), trip.end());
  h.matrix.makeCompressed();

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index r = 0; r < h.matrix.outerSize(); ++r) {
    double d = 0.0, radius = 0.0;
    for (decltype(h.matrix)::InnerIterator it(h.matrix, r); it; ++it) {
      if (it.col() == r) {
        d = it.value().real();
      } else {
        radius += std::abs(it.value());
      }
    }
    lo = std::min(lo, d - radius);
    hi = std::max(hi, d + radius);
  }
  h.spectral_center = 0.5 * (hi + lo);
  h.spectral_radius = std::max(0.5 * (hi - lo), 1e-12);
  return h;
}

ChebyshevPropagator::ChebyshevPropagator(const SparseHamiltonian& h, double dt,
                                         const EvolveOptions& options)
    : h_(&h), dt_(dt) {
  const double x = h.spectral_radius * std::abs(dt);
  const int kmax = static_cast<int>(std::ceil(x + 15.0 * std::cbrt(x) + 30.0));
  if (kmax > options.max_terms) {
    throw Error(ErrorKind::ConvergenceFailure,
                "Chebyshev series needs more than " + std::to_string(options.max_terms) + " terms");
  }
  const std::vector<double> j = bessel_sequence(x, kmax);
  int count = -1;
  for (int k = 0; k < kmax; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (k > x && std::abs(j[ku]) < options.term_tolerance && std::abs(j[ku + 1]) < options.term_tolerance) {
      count = k;
      break;
    }
  }
  if (count < 0) {
    throw Error(ErrorKind::ConvergenceFailure, "Chebyshev coefficients did not decay below tolerance");
  }
  const double sign = dt >= 0.0 ? 1.0 : -1.0;
  Complex phase{1.0, 0.0};
  const Complex minus_i = -kI * sign;
  for (int k = 0; k < std::max(count, 1); ++k) {
    coefficients_.push_back((k == 0 ? 1.0 : 2.0) * phase * j[static_cast<std::size_t>(k)]);
    phase *= minus_i;
  }
}

Vector ChebyshevPropagator::apply(const Vector& psi) const {
  if (dt_ == 0.0) return psi;
  const auto& m = h_->matrix;
  const double c = h_->spectral_center;
  const double inv_r = 1.0 / h_->spectral_radius;
  auto scaled = [&](const Vector& v) -> Vector { return (m * v - c * v) * inv_r; };

  Vector prev = psi;
  Vector out = coefficients_[0] * prev;
  if (coefficients_.size() > 1) {
    Vector cur = scaled(prev);
    out += coefficients_[1] * cur;
    for (std::size_t k = 2; k < coefficients_.size(); ++k) {
      Vector next = 2.0 * scaled(cur) - prev;
      out += coefficients_[k] * next;
      prev = std::move(cur);
      cur = std::move(next);
    }
  }
  return std::exp(-kI * (c * dt_)) * out;
}

JointState evolve(const SparseHamiltonian& h, const JointState& psi0, double t,
                  const EvolveOptions& options) {
  if (t < 0.0) throw Error(ErrorKind::InvalidArgument, "evolve requires t >= 0");
  if (psi0.amplitudes.size() != h.matrix.rows()) {
    throw Error(ErrorKind::InvalidArgument, "state does not live in the Hamiltonian's basis");
  }
  if (t == 0.0) return psi0;
  const double x = h.spectral_radius * t;
  const auto chunks = static_cast<std::size_t>(std::max(1.0, std::ceil(x / options.max_chunk)));
  const ChebyshevPropagator prop(h, t / static_cast<double>(chunks), options);
  JointState out{psi0.amplitudes};
  for (std::size_t c = 0; c < chunks; ++c) out.amplitudes = prop.apply(out.amplitudes);
  const double n0 = psi0.norm();
  if (std::abs(out.norm() - n0) > options.norm_drift * std::max(1.0, n0)) {
    throw Error(ErrorKind::ConvergenceFailure, "norm drift exceeds tolerance");
  }
  return out;
}

JointState apply_system_operator(const FockBasis& basis, const Matrix& x, const JointState& psi) {
  const int d = basis.ground_level() + 1;
  if (x.rows() != d || x.cols() != d) {
    throw Error(ErrorKind::InvalidArgument, "system operator has the wrong dimension");
  }
  JointState out{Vector::Zero(psi.amplitudes.size())};
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Complex amp = psi.amplitudes(static_cast<Eigen::Index>(i));
    if (amp == Complex(0.0, 0.0)) continue;
    const int l = basis.level(i);
    const auto occ = basis.occupied(i);
    for (int lp = 0; lp < d; ++lp) {
      const Complex xv = x(lp, l);
      if (xv == Complex(0.0, 0.0)) continue;
      const auto j = lp == l ? std::optional<std::size_t>(i) : basis.find(lp, occ);
      if (!j) {
        throw Error(ErrorKind::TruncationOverflow,
                    "system operator leaves the truncated space; raise the excitation cap");
      }
      out.amplitudes(static_cast<Eigen::Index>(*j)) += xv * amp;
    }
  }
  return out;
}

Complex system_matrix_element(const FockBasis& basis, const JointState& bra, const Matrix& op,
                              const JointState& ket) {
  const int d = basis.ground_level() + 1;
  if (op.rows() != d || op.cols() != d) {
    throw Error(ErrorKind::InvalidArgument, "system operator has the wrong dimension");
  }
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Complex amp = ket.amplitudes(static_cast<Eigen::Index>(i));
    if (amp == Complex(0.0, 0.0)) continue;
    const int l = basis.level(i);
    const auto occ = basis.occupied(i);
    for (int lp = 0; lp < d; ++lp) {
      const Complex ov = op(lp, l);
      if (ov == Complex(0.0, 0.0)) continue;
      const auto j = lp == l ? std::optional<std::size_t>(i) : basis.find(lp, occ);
      if (!j) continue;
      acc += std::conj(bra.amplitudes(static_cast<Eigen::Index>(*j))) * ov * amp;
    }
  }
  return acc;
}

JointState apply_creation(const FockBasis& basis, const Vector& profile, const JointState& psi) {
  if (static_cast<std::size_t>(profile.size()) != basis.modes()) {
    throw Error(ErrorKind::InvalidArgument, "profile length differs from the mode count");
  }
  JointState out{Vector::Zero(psi.amplitudes.size())};
  std::vector<std::uint32_t> scratch;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Complex amp = psi.amplitudes(static_cast<Eigen::Index>(i));
    if (amp == Complex(0.0, 0.0)) continue;
    const int l = basis.level(i);
    const auto occ = basis.occupied(i);
    for (std::size_t m = 0; m < basis.modes(); ++m) {
      const Complex p = profile(static_cast<Eigen::Index>(m));
      if (p == Complex(0.0, 0.0)) continue;
      scratch.assign(occ.begin(), occ.end());
      scratch.insert(std::upper_bound(scratch.begin(), scratch.end(), static_cast<std::uint32_t>(m)),
                     static_cast<std::uint32_t>(m));
      const auto j = basis.find(l, scratch);
      if (!j) {
        throw Error(ErrorKind::TruncationOverflow,
                    "creation operator leaves the truncated space; raise the excitation cap");
      }
      const auto occupation = std::count(scratch.begin(), scratch.end(), static_cast<std::uint32_t>(m));
      out.amplitudes(static_cast<Eigen::Index>(*j)) +=
          std::sqrt(static_cast<double>(occupation)) * p * amp;
    }
  }
  return out;
}

FockModel::FockModel(const ModelSpec& spec, const DiscretizedBath& bath, int n_max, std::size_t cap)
    : spec_(spec),
      bath_(bath),
      basis_(FockBasis::build(spec.levels(), bath.total_modes(), n_max, cap)),
      hamiltonian_(build_hamiltonian(spec_, bath_, basis_)) {
  photon_index_.resize(basis_.modes());
  if (n_max >= 1) {
    for (std::size_t m = 0; m < basis_.modes(); ++m) {
      const std::uint32_t mm = static_cast<std::uint32_t>(m);
      photon_index_[m] = *basis_.find(basis_.ground_level(), std::span<const std::uint32_t>(&mm, 1));
    }
  }
}

JointState FockModel::product_state(const Vector& system) const {
  if (system.size() != levels() + 1) {
    throw Error(ErrorKind::InvalidArgument, "system vector must have n + 1 components");
  }
  JointState psi{Vector::Zero(static_cast<Eigen::Index>(basis_.size()))};
  for (int l = 0; l <= basis_.ground_level(); ++l) {
    if (system(l) == Complex(0.0, 0.0)) continue;
    const auto idx = basis_.find(l, {});
    if (!idx) {
      throw Error(ErrorKind::TruncationOverflow, "excited product state needs an excitation cap >= 1");
    }
    psi.amplitudes(static_cast<Eigen::Index>(*idx)) = system(l);
  }
  return psi;
}

Vector FockModel::photon_profile(const JointState& psi) const {
  Vector p = Vector::Zero(static_cast<Eigen::Index>(basis_.modes()));
  if (basis_.n_max() < 1) return p;
  for (std::size_t m = 0; m < basis_.modes(); ++m) {
    p(static_cast<Eigen::Index>(m)) = psi.amplitudes(static_cast<Eigen::Index>(photon_index_[m]));
  }
  return p;
}

Vector FockModel::excited_amplitudes(const JointState& psi) const {
  Vector e(levels());
  for (Eigen::Index l = 0; l < levels(); ++l) {
    const auto idx = basis_.find(static_cast<int>(l), {});
    e(l) = idx ? psi.amplitudes(static_cast<Eigen::Index>(*idx)) : Complex(0.0, 0.0);
  }
  return e;
}

SurvivalOperator extract_survival(const ModelSpec& spec, const DiscretizedBath& bath,
                                  double horizon, double step, const EvolveOptions& options) {
  const TimeGrid grid = TimeGrid::uniform(horizon, step);
  const FockModel model(spec, bath, 1);
  const auto n = spec.levels();
  std::vector<Matrix> a(grid.size(), Matrix::Zero(n, n));
  const ChebyshevPropagator prop(model.hamiltonian(), step, options);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector sys = Vector::Zero(n + 1);
    sys(i) = 1.0;
    JointState psi = model.product_state(sys);
    a[0].col(i) = model.excited_amplitudes(psi);
    for (std::size_t k = 1; k < grid.size(); ++k) {
      psi.amplitudes = prop.apply(psi.amplitudes);
      a[k].col(i) = model.excited_amplitudes(psi);
    }
    if (std::abs(psi.norm() - 1.0) > options.norm_drift) {
      throw Error(ErrorKind::ConvergenceFailure, "norm drift exceeds tolerance during extraction");
    }
  }
  return SurvivalOperator(grid, std::move(a), Provenance::FockExtracted);
}

void write_state_csv(std::ostream& os, const JointState& psi) {
  os << "index,re,im\n";
  char buf[96];
  for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", static_cast<long>(i),
                  psi.amplitudes(i).real(), psi.amplitudes(i).imag());
    os << buf;
  }
}

}  // namespace gsb
