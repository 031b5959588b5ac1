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
#include <optional>
#include <vector>

#include "gsb/linalg.hpp"

namespace gsb {

enum class FormFactorKind { Flat, Lorentzian, BoxWindow, Tabulated };

const char* to_string(FormFactorKind kind) noexcept;

/// Modulus-squared coupling density |f(omega)|^2 of one bath channel.
///
/// Phases of f are gauge and never stored; every quantity downstream depends
/// on |f|^2 only. Flat is kept symbolic: its kernel is a delta and it has no
/// finite total weight, so it can be discretized only inside an explicit
/// window and never sampled as a kernel.
class FormFactor {
 public:
  /// |f|^2 = gamma / 2pi on the whole real line. `center` only locates the
  /// discretization window.
  static FormFactor flat(double gamma, double center = 0.0);
  /// |f|^2 = (gamma / 2pi) lambda^2 / ((omega - center)^2 + lambda^2)
  static FormFactor lorentzian(double gamma, double width, double center = 0.0);
  /// |f|^2 = gamma / 2pi on [center - half_bandwidth, center + half_bandwidth]
  static FormFactor box_window(double gamma, double half_bandwidth, double center = 0.0);
  /// Piecewise-linear |f|^2 through the samples, zero outside the grid.
  static FormFactor tabulated(std::vector<double> omega, std::vector<double> density);

  FormFactorKind kind() const noexcept { return kind_; }
  bool unbounded_support() const noexcept { return kind_ == FormFactorKind::Flat; }

  double gamma() const noexcept { return gamma_; }
  double width() const noexcept { return width_; }
  double center() const noexcept { return center_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& samples() const noexcept { return samples_; }

  double density(double omega) const;

  /// Integral of |f|^2 over the real line. Throws FlatKernelNotSampleable for Flat.
  double total_weight() const;

  /// Integral of |f(omega)|^2 exp(-i omega t). Closed forms for Lorentzian
  /// and BoxWindow, trapezoidal rule on the sample grid for Tabulated.
  Complex fourier(double t) const;

 private:
  FormFactor() = default;

  FormFactorKind kind_ = FormFactorKind::Flat;
  double gamma_ = 0.0;
  double width_ = 0.0;  // lambda for Lorentzian, W for BoxWindow
  double center_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> samples_;
};

/// Generalized spin-boson model: n excited levels above one ground state,
/// r <= n boson channels coupled through |g><beta_j| b_j^dagger + h.c.
struct ModelSpec {
  Matrix h_excited;                    // n x n, renormalized energies
  std::vector<Vector> betas;           // r coupling vectors in C^n
  std::vector<FormFactor> form_factors;  // one per channel

  Eigen::Index levels() const noexcept { return h_excited.rows(); }
  std::size_t channels() const noexcept { return betas.size(); }
  bool all_flat() const noexcept;
  bool any_flat() const noexcept;

  /// Throws InvalidModel when an invariant is broken.
  void validate() const;
};

/// Convenience constructor for the n = r = 1 model.
ModelSpec qubit_model(double omega_e, const FormFactor& form_factor);

/// Uniform grid t_k = k * step, k = 0..intervals.
struct TimeGrid {
  double step = 0.0;
  std::size_t intervals = 0;

  std::size_t size() const noexcept { return intervals + 1; }
  double time(std::size_t k) const noexcept { return static_cast<double>(k) * step; }
  double horizon() const noexcept { return time(intervals); }

  /// Grid index of t when t is a grid point (relative tolerance 1e-9).
  std::optional<std::size_t> index_of(double t) const;

  /// Throws InvalidArgument unless horizon / step is a positive integer.
  static TimeGrid uniform(double horizon, double step);
};

struct MemoryKernel {
  TimeGrid grid;
  std::vector<Matrix> samples;  // G(t_k)
};

/// G(t) = -i sum_l [int |f_l|^2 e^{-i omega t}] |beta_l><beta_l|
Matrix kernel_at(const ModelSpec& spec, double t);

/// Samples G on the grid. Throws FlatKernelNotSampleable if any channel is Flat.
MemoryKernel eval_kernel(const ModelSpec& spec, const TimeGrid& grid);

struct BathChannel {
  Vector beta;
  std::vector<double> frequencies;
  std::vector<double> couplings;  // g_k = |f(omega_k)| sqrt(d_omega)
};

/// Finite-mode midpoint quadrature of every bath channel.
struct DiscretizedBath {
  double half_bandwidth = 0.0;
  int modes_per_channel = 0;
  double spacing = 0.0;
  std::vector<BathChannel> channels;

  std::size_t total_modes() const noexcept {
    return channels.size() * static_cast<std::size_t>(modes_per_channel);
  }
  /// 2 pi / spacing; beyond this the finite bath feeds amplitude back.
  double recurrence_time() const noexcept;
  /// Frequency of flat mode index m = j * M + k.
  double frequency(std::size_t mode) const;
  double coupling(std::size_t mode) const;
};

/// Midpoint grid omega_k = center - W + (k + 1/2) dW with dW = 2W / M per
/// channel. Throws InvalidBandwidth for W <= 0 and InvalidArgument for M < 2.
DiscretizedBath discretize_bath(const ModelSpec& spec, double half_bandwidth, int modes);

/// i * (discretized G(0)) = sum_j sum_k g_jk^2 |beta_j><beta_j|.
Matrix discretized_weight(const DiscretizedBath& bath);

}  // namespace gsb
