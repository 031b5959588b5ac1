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
#include "gsb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gsb/error.hpp"

namespace gsb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorKind::InvalidModel, std::string(name) + " must be positive and finite");
  }
}

}  // namespace

const char* to_string(FormFactorKind kind) noexcept {
  switch (kind) {
    case FormFactorKind::Flat: return "flat";
    case FormFactorKind::Lorentzian: return "lorentzian";
    case FormFactorKind::BoxWindow: return "box";
    case FormFactorKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

FormFactor FormFactor::flat(double gamma, double center) {
  require_positive(gamma, "flat gamma");
  FormFactor f;
  f.kind_ = FormFactorKind::Flat;
  f.gamma_ = gamma;
  f.center_ = center;
  return f;
}

FormFactor FormFactor::lorentzian(double gamma, double width, double center) {
  require_positive(gamma, "lorentzian gamma");
  require_positive(width, "lorentzian lambda");
  FormFactor f;
  f.kind_ = FormFactorKind::Lorentzian;
  f.gamma_ = gamma;
  f.width_ = width;
  f.center_ = center;
  return f;
}

FormFactor FormFactor::box_window(double gamma, double half_bandwidth, double center) {
  require_positive(gamma, "box gamma");
  require_positive(half_bandwidth, "box half-bandwidth");
  FormFactor f;
  f.kind_ = FormFactorKind::BoxWindow;
  f.gamma_ = gamma;
  f.width_ = half_bandwidth;
  f.center_ = center;
  return f;
}

FormFactor FormFactor::tabulated(std::vector<double> omega, std::vector<double> density) {
  if (omega.size() < 2 || omega.size() != density.size()) {
    throw Error(ErrorKind::InvalidModel,
                "tabulated form factor needs >= 2 frequencies and one density per frequency");
  }
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (!std::isfinite(omega[i]) || !std::isfinite(density[i])) {
      throw Error(ErrorKind::InvalidModel, "tabulated form factor has non-finite entries");
    }
    if (density[i] < 0.0) {
      throw Error(ErrorKind::InvalidModel, "tabulated |f|^2 must be nonnegative");
    }
    if (i > 0 && !(omega[i] > omega[i - 1])) {
      throw Error(ErrorKind::InvalidModel, "tabulated grid must be strictly increasing");
    }
  }
  FormFactor f;
  f.kind_ = FormFactorKind::Tabulated;
  f.grid_ = std::move(omega);
  f.samples_ = std::move(density);
  return f;
}

double FormFactor::density(double omega) const {
  switch (kind_) {
    case FormFactorKind::Flat:
      return gamma_ / kTwoPi;
    case FormFactorKind::Lorentzian: {
      const double d = omega - center_;
      return gamma_ / kTwoPi * width_ * width_ / (d * d + width_ * width_);
    }
    case FormFactorKind::BoxWindow:
      return std::abs(omega - center_) <= width_ ? gamma_ / kTwoPi : 0.0;
    case FormFactorKind::Tabulated: {
      if (omega < grid_.front() || omega > grid_.back()) return 0.0;
      auto it = std::upper_bound(grid_.begin(), grid_.end(), omega);
      if (it == grid_.end()) return samples_.back();
      const auto hi = static_cast<std::size_t>(it - grid_.begin());
      const auto lo = hi - 1;
      const double u = (omega - grid_[lo]) / (grid_[hi] - grid_[lo]);
      return (1.0 - u) * samples_[lo] + u * samples_[hi];
    }
  }
  return 0.0;
}

double FormFactor::total_weight() const {
  return fourier(0.0).real();
}

Complex FormFactor::fourier(double t) const {
  switch (kind_) {
    case FormFactorKind::Flat:
      throw Error(ErrorKind::FlatKernelNotSampleable,
                  "flat coupling has a delta kernel; use the closed-form branch");
    case FormFactorKind::Lorentzian:
      return 0.5 * gamma_ * width_ * std::exp(-width_ * std::abs(t)) *
             std::exp(-kI * (center_ * t));
    case FormFactorKind::BoxWindow: {
      const double x = width_ * t;
      const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
      return gamma_ * width_ / std::numbers::pi * sinc * std::exp(-kI * (center_ * t));
    }
    case FormFactorKind::Tabulated: {
      Complex acc{0.0, 0.0};
      Complex prev = samples_[0] * std::exp(-kI * (grid_[0] * t));
      for (std::size_t i = 1; i < grid_.size(); ++i) {
        const Complex cur = samples_[i] * std::exp(-kI * (grid_[i] * t));
        acc += 0.5 * (grid_[i] - grid_[i - 1]) * (prev + cur);
        prev = cur;
      }
      return acc;
    }
  }
  return {};
}

bool ModelSpec::all_flat() const noexcept {
  if (form_factors.empty()) return false;
  for (const auto& f : form_factors) {
    if (f.kind() != FormFactorKind::Flat) return false;
  }
  return true;
}

bool ModelSpec::any_flat() const noexcept {
  for (const auto& f : form_factors) {
    if (f.kind() == FormFactorKind::Flat) return true;
  }
  return false;
}

void ModelSpec::validate() const {
  const auto n = h_excited.rows();
  if (n < 1 || h_excited.cols() != n) {
    throw Error(ErrorKind::InvalidModel, "H_e must be a square matrix of size n >= 1");
  }
  if (!h_excited.allFinite()) throw Error(ErrorKind::InvalidModel, "H_e has non-finite entries");
  if (hermiticity_defect(h_excited) > 1e-12) {
    throw Error(ErrorKind::InvalidModel, "H_e is not Hermitian to 1e-12");
  }
  if (betas.empty() || betas.size() != form_factors.size()) {
    throw Error(ErrorKind::InvalidModel, "need r >= 1 coupling vectors, one form factor each");
  }
  if (static_cast<Eigen::Index>(betas.size()) > n) {
    throw Error(ErrorKind::InvalidModel, "bath channel count r must not exceed n");
  }
  for (const auto& b : betas) {
    if (b.size() != n) throw Error(ErrorKind::InvalidModel, "coupling vector has wrong length");
    if (!b.allFinite() || b.norm() == 0.0) {
      throw Error(ErrorKind::InvalidModel, "coupling vectors must be finite and nonzero");
    }
  }
}

ModelSpec qubit_model(double omega_e, const FormFactor& form_factor) {
  ModelSpec spec;
  spec.h_excited = Matrix::Constant(1, 1, Complex(omega_e, 0.0));
  spec.betas = {Vector::Ones(1)};
  spec.form_factors = {form_factor};
  return spec;
}

std::optional<std::size_t> TimeGrid::index_of(double t) const {
  if (step <= 0.0 || t < -1e-12) return std::nullopt;
  const double ratio = t / step;
  const double k = std::round(ratio);
  if (std::abs(ratio - k) > 1e-9 * std::max(1.0, ratio)) return std::nullopt;
  if (k > static_cast<double>(intervals)) return std::nullopt;
  return static_cast<std::size_t>(k);
}

TimeGrid TimeGrid::uniform(double horizon, double step) {
  if (!(horizon > 0.0) || !(step > 0.0) || !std::isfinite(horizon) || !std::isfinite(step)) {
    throw Error(ErrorKind::InvalidArgument, "horizon and step must be positive");
  }
  const double ratio = horizon / step;
  const double k = std::round(ratio);
  if (k < 1.0 || std::abs(ratio - k) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorKind::InvalidArgument, "horizon / step must be a positive integer");
  }
  return TimeGrid{step, static_cast<std::size_t>(k)};
}

Matrix kernel_at(const ModelSpec& spec, double t) {
  const auto n = spec.levels();
  Matrix g = Matrix::Zero(n, n);
  for (std::size_t l = 0; l < spec.channels(); ++l) {
    const Complex ft = spec.form_factors[l].fourier(t);
    g += (-kI * ft) * (spec.betas[l] * spec.betas[l].adjoint());
  }
  return g;
}

MemoryKernel eval_kernel(const ModelSpec& spec, const TimeGrid& grid) {
  spec.validate();
  if (spec.any_flat()) {
    throw Error(ErrorKind::FlatKernelNotSampleable,
                "flat coupling has a delta kernel; use the closed-form branch");
  }
  MemoryKernel kernel{grid, {}};
  kernel.samples.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) kernel.samples.push_back(kernel_at(spec, grid.time(k)));
  return kernel;
}

double DiscretizedBath::recurrence_time() const noexcept { return kTwoPi / spacing; }

double DiscretizedBath::frequency(std::size_t mode) const {
  const auto m = static_cast<std::size_t>(modes_per_channel);
  return channels.at(mode / m).frequencies.at(mode % m);
}

double DiscretizedBath::coupling(std::size_t mode) const {
  const auto m = static_cast<std::size_t>(modes_per_channel);
  return channels.at(mode / m).couplings.at(mode % m);
}

DiscretizedBath discretize_bath(const ModelSpec& spec, double half_bandwidth, int modes) {
  spec.validate();
  if (!(half_bandwidth > 0.0) || !std::isfinite(half_bandwidth)) {
    throw Error(ErrorKind::InvalidBandwidth, "half-bandwidth W must be positive");
  }
  if (modes < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 modes per channel");

  DiscretizedBath bath;
  bath.half_bandwidth = half_bandwidth;
  bath.modes_per_channel = modes;
  bath.spacing = 2.0 * half_bandwidth / modes;
  for (std::size_t j = 0; j < spec.channels(); ++j) {
    const auto& f = spec.form_factors[j];
    BathChannel ch;
    ch.beta = spec.betas[j];
    ch.frequencies.resize(static_cast<std::size_t>(modes));
    ch.couplings.resize(static_cast<std::size_t>(modes));
    const double lo = f.center() - half_bandwidth;
    for (int k = 0; k < modes; ++k) {
      const double w = lo + (k + 0.5) * bath.spacing;
      ch.frequencies[static_cast<std::size_t>(k)] = w;
      ch.couplings[static_cast<std::size_t>(k)] = std::sqrt(f.density(w) * bath.spacing);
    }
    bath.channels.push_back(std::move(ch));
  }
  return bath;
}

Matrix discretized_weight(const DiscretizedBath& bath) {
  if (bath.channels.empty()) return Matrix();
  const auto n = bath.channels.front().beta.size();
  Matrix w = Matrix::Zero(n, n);
  for (const auto& ch : bath.channels) {
    double s = 0.0;
    for (double g : ch.couplings) s += g * g;
    w += s * (ch.beta * ch.beta.adjoint());
  }
  return w;
}

}  // namespace gsb
