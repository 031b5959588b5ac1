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
#include "gsb/regression.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "gsb/channels.hpp"
#include "gsb/error.hpp"

namespace gsb {

void CorrelationSpec::validate(Eigen::Index system_dim) const {
  if (times.empty()) throw Error(ErrorKind::InvalidArgument, "correlator needs at least one time");
  if (x_ops.size() != times.size() || y_ops.size() != times.size()) {
    throw Error(ErrorKind::InvalidArgument, "need one (X, Y) pair per time");
  }
  if (times.front() < 0.0) throw Error(ErrorKind::InvalidArgument, "times must be nonnegative");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw Error(ErrorKind::InvalidArgument, "times must be strictly increasing");
    }
  }
  auto check = [&](const Matrix& m, const char* what) {
    if (m.rows() != system_dim || m.cols() != system_dim) {
      throw Error(ErrorKind::InvalidArgument, std::string(what) + " has the wrong dimension");
    }
  };
  for (const auto& x : x_ops) check(x, "X insertion");
  for (const auto& y : y_ops) check(y, "Y insertion");
  check(rho, "initial state");
  if (hermiticity_defect(rho) > 1e-12) throw Error(ErrorKind::InvalidArgument, "rho is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "rho must have unit trace");
  }
  if (hermitian_eigenvalues(rho)(0) < -1e-12) {
    throw Error(ErrorKind::InvalidArgument, "rho must be positive semidefinite");
  }
}

namespace {

struct Component {
  double weight;
  Vector system;
};

std::vector<Component> pure_components(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  std::vector<Component> out;
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-14) out.push_back({p, es.eigenvectors().col(i)});
  }
  return out;
}

bool same_ops(std::span<const Matrix> a, std::span<const Matrix> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols() || a[i] != b[i]) return false;
  }
  return true;
}

// Memoizes U_{t_k - t_{k-1}} O_{k-1} ... O_0 U_{t_0} |phi_c, vac> by
// (component, operator prefix).
class ChainCache {
 public:
  ChainCache(const FockModel& model, std::vector<Component> comps, std::vector<double> times,
             const EvolveOptions& options)
      : model_(model), comps_(std::move(comps)), times_(std::move(times)), options_(options) {}

  const std::vector<Component>& components() const { return comps_; }

  const JointState& state(std::size_t comp, std::span<const Matrix> prefix) {
    for (const auto& e : entries_) {
      if (e->comp == comp && same_ops(e->prefix, prefix)) return e->state;
    }
    JointState s;
    if (prefix.empty()) {
      s = model_.evolve(model_.product_state(comps_[comp].system), times_.front(), options_);
    } else {
      const std::size_t k = prefix.size();
      const JointState& before = state(comp, prefix.first(k - 1));
      const JointState inserted = apply_system_operator(model_.basis(), prefix[k - 1], before);
      s = model_.evolve(inserted, times_[k] - times_[k - 1], options_);
    }
    auto e = std::make_unique<Entry>(Entry{comp, {prefix.begin(), prefix.end()}, std::move(s)});
    entries_.push_back(std::move(e));
    return entries_.back()->state;
  }

 private:
  struct Entry {
    std::size_t comp;
    std::vector<Matrix> prefix;
    JointState state;
  };
  const FockModel& model_;
  std::vector<Component> comps_;
  std::vector<double> times_;
  EvolveOptions options_;
  std::vector<std::unique_ptr<Entry>> entries_;
};

}  // namespace

std::vector<Complex> lhs_correlations(const FockModel& model, std::span<const CorrelationSpec> corrs,
                                      const EvolveOptions& options) {
  if (corrs.empty()) return {};
  const Eigen::Index d = model.levels() + 1;
  for (const auto& c : corrs) {
    c.validate(d);
    if (c.times != corrs.front().times || c.rho != corrs.front().rho) {
      throw Error(ErrorKind::InvalidArgument, "batched correlators must share times and rho");
    }
  }
  ChainCache cache(model, pure_components(corrs.front().rho), corrs.front().times, options);
  std::vector<Complex> out;
  out.reserve(corrs.size());
  for (const auto& c : corrs) {
    const std::size_t m = c.insertions() - 1;
    std::vector<Matrix> bra_ops(m);
    for (std::size_t k = 0; k < m; ++k) bra_ops[k] = c.y_ops[k].adjoint();
    const Matrix final_op = c.y_ops[m] * c.x_ops[m];
    Complex acc{0.0, 0.0};
    for (std::size_t comp = 0; comp < cache.components().size(); ++comp) {
      const JointState& ket = cache.state(comp, std::span<const Matrix>(c.x_ops).first(m));
      const JointState& bra = cache.state(comp, bra_ops);
      acc += cache.components()[comp].weight * system_matrix_element(model.basis(), bra, final_op, ket);
    }
    out.push_back(acc);
  }
  return out;
}

Complex lhs_correlation(const FockModel& model, const CorrelationSpec& corr,
                        const EvolveOptions& options) {
  return lhs_correlations(model, std::span<const CorrelationSpec>(&corr, 1), options).front();
}

Complex rhs_correlation(const SurvivalOperator& a, const CorrelationSpec& corr) {
  corr.validate(a.dim() + 1);
  Matrix sigma = apply_channel(a.at_time(corr.times.front()), corr.rho);
  for (std::size_t k = 0; k < corr.insertions(); ++k) {
    sigma = corr.x_ops[k] * sigma * corr.y_ops[k];
    if (k + 1 < corr.insertions()) {
      sigma = apply_channel(a.at_time(corr.times[k + 1] - corr.times[k]), sigma);
    }
  }
  return sigma.trace();
}

namespace {

int cap_for(std::span<const CorrelationSpec> corrs, int n_max) {
  if (n_max > 0) return n_max;
  int need = 1;
  for (const auto& c : corrs) need = std::max(need, c.required_excitations());
  return need;
}

}  // namespace

RegressionReport regression_gap(const ModelSpec& spec, const DiscretizedBath& bath,
                                const SurvivalOperator& a, std::span<const CorrelationSpec> corrs,
                                int n_max) {
  RegressionReport rep;
  rep.n_max = cap_for(corrs, n_max);
  rep.half_bandwidth = bath.half_bandwidth;
  rep.modes = bath.modes_per_channel;
  rep.step = a.grid().step;
  // Validate grid alignment before the expensive joint evolution.
  for (const auto& c : corrs) rep.rhs.push_back(rhs_correlation(a, c));
  const FockModel model(spec, bath, rep.n_max);
  rep.lhs = lhs_correlations(model, corrs);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    rep.gaps.push_back(std::abs(rep.lhs[i] - rep.rhs[i]));
    rep.max_gap = std::max(rep.max_gap, rep.gaps.back());
  }
  return rep;
}

RegressionReport convergence_sweep(const ModelSpec& spec, std::span<const CorrelationSpec> corrs,
                                   std::span<const Refinement> refinements, double step, int n_max,
                                   unsigned threads) {
  if (refinements.empty()) throw Error(ErrorKind::InvalidArgument, "empty refinement ladder");
  if (corrs.empty()) throw Error(ErrorKind::InvalidArgument, "no correlators to sweep");
  double horizon = 0.0;
  for (const auto& c : corrs) horizon = std::max(horizon, c.times.back());
  // The grid must also reach every gap t_{k+1} - t_k, which never exceeds the last time.
  std::vector<RegressionReport> results(refinements.size());
  std::vector<std::exception_ptr> errors(refinements.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < refinements.size(); i = next++) {
      try {
        const auto& r = refinements[i];
        const DiscretizedBath bath = discretize_bath(spec, r.half_bandwidth, r.modes);
        const SurvivalOperator a = extract_survival(spec, bath, horizon, step);
        results[i] = regression_gap(spec, bath, a, corrs, n_max);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(refinements.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  RegressionReport rep = results.back();
  for (const auto& r : results) {
    rep.sweep.push_back(SweepPoint{r.half_bandwidth, r.modes, r.n_max, r.gaps, r.max_gap});
  }
  return rep;
}

TwoPhotonReport two_photon_checks(const ModelSpec& spec, const DiscretizedBath& bath,
                                        double t0, double t1, Eigen::Index level,
                                        const EvolveOptions& options) {
  if (t0 < 0.0 || t1 < t0) throw Error(ErrorKind::InvalidArgument, "need 0 <= t0 <= t1");
  if (level < 0 || level >= spec.levels()) {
    throw Error(ErrorKind::InvalidArgument, "excited level out of range");
  }
  const FockModel model(spec, bath, 1);
  Vector sys = Vector::Zero(spec.levels() + 1);
  sys(level) = 1.0;
  const JointState start = model.product_state(sys);
  const double gap = t1 - t0;

  const Vector xi_t0 = model.photon_profile(model.evolve(start, t0, options));
  const Vector xi_gap = model.photon_profile(model.evolve(start, gap, options));
  Vector xi_shift(xi_t0.size());
  for (Eigen::Index m = 0; m < xi_t0.size(); ++m) {
    xi_shift(m) = std::exp(-kI * (gap * bath.frequency(static_cast<std::size_t>(m)))) * xi_t0(m);
  }

  TwoPhotonReport rep;
  const Complex overlap = xi_shift.dot(xi_gap);  // conjugates the first argument
  rep.overlap_modulus = std::abs(overlap);
  rep.xi_t0_norm = xi_t0.norm();
  rep.xi_gap_norm = xi_gap.norm();
  rep.product_of_norms = xi_gap.squaredNorm() * xi_t0.squaredNorm();
  rep.two_photon_norm_permanent =
      xi_shift.squaredNorm() * xi_gap.squaredNorm() + std::norm(overlap);
  rep.norm_identity_gap = std::abs(rep.two_photon_norm_permanent - rep.product_of_norms);

  const FockBasis two = FockBasis::build(spec.levels(), bath.total_modes(), 2);
  JointState vac{Vector::Zero(static_cast<Eigen::Index>(two.size()))};
  vac.amplitudes(static_cast<Eigen::Index>(two.vacuum(two.ground_level()))) = 1.0;
  const JointState pair = apply_creation(two, xi_shift, apply_creation(two, xi_gap, vac));
  rep.two_photon_norm_direct = pair.amplitudes.squaredNorm();
  return rep;
}

std::vector<Matrix> matrix_units(Eigen::Index dim) {
  std::vector<Matrix> out;
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      Matrix u = Matrix::Zero(dim, dim);
      u(i, j) = 1.0;
      out.push_back(std::move(u));
    }
  }
  return out;
}

std::vector<CorrelationSpec> matrix_unit_correlators(const Matrix& rho, double t0, double t1) {
  const auto d = rho.rows();
  const auto units = matrix_units(d);
  const Matrix id = Matrix::Identity(d, d);
  std::vector<CorrelationSpec> out;
  for (const auto& x : units) {
    for (const auto& y : units) {
      for (const auto& probe : units) {
        out.push_back(CorrelationSpec{{t0, t1}, {x, probe}, {y, id}, rho});
      }
    }
  }
  return out;
}

namespace {

nlohmann::ordered_json complex_json(Complex z) { return nlohmann::ordered_json::array({z.real(), z.imag()}); }

}  // namespace

std::string report_to_json(const RegressionReport& report) {
  nlohmann::ordered_json j;
  j["half_bandwidth"] = report.half_bandwidth;
  j["modes"] = report.modes;
  j["n_max"] = report.n_max;
  j["step"] = report.step;
  j["max_gap"] = report.max_gap;
  auto lhs = nlohmann::ordered_json::array();
  auto rhs = nlohmann::ordered_json::array();
  for (auto z : report.lhs) lhs.push_back(complex_json(z));
  for (auto z : report.rhs) rhs.push_back(complex_json(z));
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["gaps"] = report.gaps;
  auto sweep = nlohmann::ordered_json::array();
  for (const auto& p : report.sweep) {
    sweep.push_back({{"half_bandwidth", p.half_bandwidth},
                     {"modes", p.modes},
                     {"n_max", p.n_max},
                     {"max_gap", p.max_gap}});
  }
  j["sweep"] = sweep;
  return j.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& os, const RegressionReport& report) {
  os << "W,M,N_max,gap\n";
  char buf[128];
  for (const auto& p : report.sweep) {
    std::snprintf(buf, sizeof buf, "%.10g,%d,%d,%.17g\n", p.half_bandwidth, p.modes, p.n_max, p.max_gap);
    os << buf;
  }
}

std::string report_to_json(const TwoPhotonReport& report) {
  nlohmann::ordered_json j;
  j["overlap_modulus"] = report.overlap_modulus;
  j["two_photon_norm_direct"] = report.two_photon_norm_direct;
  j["two_photon_norm_permanent"] = report.two_photon_norm_permanent;
  j["product_of_norms"] = report.product_of_norms;
  j["norm_identity_gap"] = report.norm_identity_gap;
  j["xi_t0_norm"] = report.xi_t0_norm;
  j["xi_gap_norm"] = report.xi_gap_norm;
  return j.dump(2) + "\n";
}

}  // namespace gsb
