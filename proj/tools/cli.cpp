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
#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsb/channels.hpp"
#include "gsb/divisibility.hpp"
#include "gsb/dynamics.hpp"
#include "gsb/error.hpp"
#include "gsb/fock.hpp"
#include "gsb/model_io.hpp"
#include "gsb/regression.hpp"
#include "gsb/spectral.hpp"

namespace gsb::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Config {
  std::string model;
  double horizon = 5.0;
  std::optional<double> step;
  std::optional<double> half_bandwidth;
  std::optional<int> modes;
  int n_max = 0;
  std::uint64_t seed = kDefaultPositivitySeed;
  std::string out = ".";
  std::string sweep;
  std::string times = "1,2";
  std::string ops = "xbasis";
  std::string rho = "plus";
  double tol = 1e-9;
  int samples = 100;
};

// Raised for checks performed by the driver itself.
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};


std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw Error(ErrorKind::ConfigParse, std::string(flag) + ": cannot parse \"" + item + "\"");
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::ConfigParse, std::string(flag) + ": empty list");
  return out;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Writes next to the target and renames, so readers never see partial files.
void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os << content;
    os.flush();
    if (!os) throw Error(ErrorKind::ConfigParse, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::ConfigParse, "cannot move output into place at " + path.string());
  }
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

json model_json(const ModelSpec& spec) { return json::parse(model_to_json(spec)); }

double step_or(const Config& c, double fallback) { return c.step.value_or(fallback); }

int modes_for(const Config& c, double w) {
  const double base_w = c.half_bandwidth.value_or(20.0);
  const double ratio = static_cast<double>(c.modes.value_or(static_cast<int>(std::lround(20.0 * base_w)))) / base_w;
  return std::max(2, static_cast<int>(std::lround(ratio * w)));
}

// Survival operator from the source the flags select: the discretized bath
// when --W is given, the closed form for flat couplings, otherwise Volterra.
SurvivalOperator survival_for(const ModelSpec& spec, const Config& c, double step) {
  if (c.half_bandwidth) {
    const DiscretizedBath bath = discretize_bath(spec, *c.half_bandwidth, modes_for(c, *c.half_bandwidth));
    return extract_survival(spec, bath, c.horizon, step);
  }
  if (spec.all_flat()) return closed_form_flat(spec, c.horizon, step);
  if (spec.any_flat()) {
    throw Error(ErrorKind::MixedKinds, "mixed flat and non-flat channels need --W to discretize");
  }
  return solve_survival(spec, c.horizon, step);
}

void check_norm_bound(const SurvivalOperator& a) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double norm = operator_norm(a.at(k));
    if (norm > 1.0 + 1e-8) {
      throw InvariantViolation("||A(t)|| = " + format_double(norm) + " exceeds 1 at t = " +
                               format_double(a.grid().time(k)));
    }
  }
}

json run_header(const char* command, const Config& c, const ModelSpec& spec) {
  json j;
  j["command"] = command;
  j["model"] = model_json(spec);
  j["T"] = c.horizon;
  return j;
}

int cmd_solve(const Config& c, std::ostream& out) {
  const ModelSpec spec = load_model(c.model);
  const SurvivalOperator a = survival_for(spec, c, step_or(c, 1e-3));
  check_norm_bound(a);
  const fs::path path = fs::path(c.out) / "survival.csv";
  write_atomic(path, render([&](std::ostream& os) { write_survival_csv(os, a); }));
  out << "solve: " << a.size() << " samples (" << to_string(a.provenance()) << ") -> " << path.string()
      << "\n";
  return kExitOk;
}

int cmd_divisibility(const Config& c, std::ostream& out) {
  const ModelSpec spec = load_model(c.model);
  const double step = step_or(c, 1e-3);
  const SurvivalOperator a = survival_for(spec, c, step);
  check_norm_bound(a);
  ClassifyOptions opts;
  opts.norm_slack = c.tol;
  const DivisibilityReport rep = classify(a, opts);
  const double scan = trace_norm_contraction_scan(a, c.samples, c.seed);

  json j = run_header("divisibility", c, spec);
  j["h"] = step;
  j["provenance"] = to_string(a.provenance());
  j["tol"] = c.tol;
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["contraction_max_rate"] = scan;
  j["report"] = json::parse(report_to_json(rep));
  const fs::path dir(c.out);
  write_atomic(dir / "divisibility.json", j.dump(2) + "\n");
  write_atomic(dir / "divisibility.csv", render([&](std::ostream& os) { write_report_csv(os, rep); }));

  out << "divisibility: cp=" << rep.cp_divisible << " p=" << rep.p_divisible << " semigroup=" << rep.semigroup;
  if (rep.first_violation_time) out << " first_violation=" << format_double(*rep.first_violation_time);
  out << " contraction_max_rate=" << format_double(scan) << "\n";

  // Sampling can only falsify: a p-divisible family must never expand a sample.
  if (rep.p_divisible && scan > 1e-6) {
    throw InvariantViolation("trace norm grows by " + format_double(scan) + " on a p-divisible family");
  }
  if (a.dim() == 1 && !rep.criteria_consistent) {
    throw InvariantViolation("norm and one-step Choi criteria disagree for a qubit");
  }
  return kExitOk;
}

Matrix initial_state(const std::string& name, Eigen::Index dim) {
  Vector psi = Vector::Zero(dim);
  const Eigen::Index g = dim - 1;
  if (name == "plus") {
    psi(0) = psi(g) = 1.0 / std::sqrt(2.0);
  } else if (name == "excited") {
    psi(0) = 1.0;
  } else if (name == "ground") {
    psi(g) = 1.0;
  } else {
    throw Error(ErrorKind::ConfigParse, "--rho must be plus, excited or ground");
  }
  return psi * psi.adjoint();
}

std::vector<CorrelationSpec> correlators_for(const Config& c, const std::vector<double>& times,
                                             const Matrix& rho) {
  const Eigen::Index d = rho.rows();
  const Eigen::Index g = d - 1;
  if (c.ops == "xbasis") {
    if (times.size() != 2) throw Error(ErrorKind::ConfigParse, "--ops xbasis needs exactly two --times");
    return matrix_unit_correlators(rho, times[0], times[1]);
  }
  // Left insertion X_k; the right one Y_k is the identity except for the
  // projector, which is applied on both sides.
  const Matrix id = Matrix::Identity(d, d);
  Matrix x = id, y = id;
  if (c.ops == "sigmax") {
    x = Matrix::Zero(d, d);
    x(0, g) = x(g, 0) = 1.0;
  } else if (c.ops == "projector") {
    x = Matrix::Zero(d, d);
    x(0, 0) = 1.0;
    y = x;
  } else if (c.ops != "identity") {
    throw Error(ErrorKind::ConfigParse, "--ops must be xbasis, identity, sigmax or projector");
  }
  return {CorrelationSpec{times, std::vector<Matrix>(times.size(), x), std::vector<Matrix>(times.size(), y), rho}};
}

int cmd_regression(const Config& c, std::ostream& out) {
  const ModelSpec spec = load_model(c.model);
  const std::vector<double> times = parse_list(c.times, "--times");
  const Matrix rho = initial_state(c.rho, spec.levels() + 1);
  const auto corrs = correlators_for(c, times, rho);
  for (const auto& corr : corrs) corr.validate(spec.levels() + 1);

  std::vector<Refinement> ladder;
  if (c.sweep.empty()) {
    const double w = c.half_bandwidth.value_or(20.0);
    ladder.push_back({w, modes_for(c, w)});
  } else {
    for (double w : parse_list(c.sweep, "--sweep")) ladder.push_back({w, modes_for(c, w)});
  }
  const double step = step_or(c, 0.01);
  const RegressionReport rep = convergence_sweep(spec, corrs, ladder, step, c.n_max, worker_threads());

  json j = run_header("regression", c, spec);
  j.erase("T");
  j["times"] = times;
  j["ops"] = c.ops;
  j["rho"] = c.rho;
  j["h"] = step;
  j["report"] = json::parse(report_to_json(rep));
  const fs::path dir(c.out);
  write_atomic(dir / "regression.json", j.dump(2) + "\n");
  if (!c.sweep.empty()) {
    write_atomic(dir / "sweep.csv", render([&](std::ostream& os) { write_sweep_csv(os, rep); }));
  }
  for (const auto& p : rep.sweep) {
    out << "regression: W=" << format_double(p.half_bandwidth) << " M=" << p.modes << " N_max=" << p.n_max
        << " gap=" << format_double(p.max_gap) << "\n";
  }
  return kExitOk;
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

// Built-in invariant suite on fixed models; independent of the --model flag.
std::vector<Check> invariant_suite(std::uint64_t seed) {
  std::vector<Check> checks;

  // Choi positivity and contractivity must coincide; sampling may only
  // report non-positivity when both say so.
  int bad = 0;
  for (int i = 0; i < 90; ++i) {
    auto rng = sample_stream(seed, static_cast<std::uint64_t>(i));
    const Eigen::Index n = 1 + i % 3;
    std::normal_distribution<double> g(0.0, std::sqrt(0.5 / static_cast<double>(n)));
    Matrix a(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index col = 0; col < n; ++col) a(r, col) = Complex(g(rng), g(rng));
    }
    const bool contractive = operator_norm(a) <= 1.0 + 1e-10;
    if (is_cp(a) != contractive || (!is_positive_map(a) && contractive)) ++bad;
  }
  checks.push_back({"choi-norm-equivalence", bad == 0, std::to_string(bad) + " disagreements in 90 draws"});

  for (const auto [gamma, lambda] : {std::pair{0.1, 1.0}, std::pair{8.0, 1.0}}) {
    const ModelSpec spec = qubit_model(0.0, FormFactor::lorentzian(gamma, lambda));
    const DivisibilityReport rep = classify(solve_survival(spec, 4.0, 2e-3));
    const bool under = lambda < 2.0 * gamma;
    const bool ok = rep.criteria_consistent && rep.p_divisible != under;
    char name[64];
    std::snprintf(name, sizeof name, "lorentzian-divisibility gamma=%g lambda=%g", gamma, lambda);
    checks.push_back({name, ok,
                      std::string("p_divisible=") + (rep.p_divisible ? "true" : "false")});
  }

  const ModelSpec flat = qubit_model(0.0, FormFactor::flat(1.0));
  const DivisibilityReport flat_rep = classify(closed_form_flat(flat, 4.0, 1e-2));
  checks.push_back({"flat-semigroup", flat_rep.semigroup && flat_rep.cp_divisible,
                    "residual " + format_double(flat_rep.semigroup_residual)});

  const DiscretizedBath bath = discretize_bath(flat, 20.0, 400);
  const TwoPhotonReport app = two_photon_checks(flat, bath, 1.0, 2.0);
  const double identity_gap = std::abs(app.two_photon_norm_direct - app.two_photon_norm_permanent);
  checks.push_back({"two-photon-overlap", app.overlap_modulus <= 5e-2,
                    "overlap " + format_double(app.overlap_modulus)});
  checks.push_back({"two-photon-norm", identity_gap <= 1e-8, "gap " + format_double(identity_gap)});
  return checks;
}

int cmd_validate(const Config& c, bool write, std::ostream& out) {
  const auto checks = invariant_suite(c.seed);
  bool all = true;
  json list = json::array();
  for (const auto& ch : checks) {
    out << (ch.pass ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << "\n";
    all = all && ch.pass;
    list.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
  }
  if (write) {
    json j;
    j["command"] = "validate";
    j["seed"] = c.seed;
    j["checks"] = list;
    j["pass"] = all;
    write_atomic(fs::path(c.out) / "validate.json", j.dump(2) + "\n");
  }
  return all ? kExitOk : kExitInvariant;
}

struct ScanRow {
  double w = 0.0;
  int m = 0;
  double spacing = 0.0;
  double recurrence = 0.0;
  double weight_error = 0.0;
  double survival_error = 0.0;
};

int cmd_bathscan(const Config& c, std::ostream& out) {
  const ModelSpec spec = load_model(c.model);
  const std::vector<double> ws = parse_list(c.sweep.empty() ? "5,10,20,40" : c.sweep, "--sweep");
  const double step = step_or(c, 0.01);
  const double horizon = c.horizon;
  // Reference reduced dynamics, shared by all rows.
  Config ref_cfg = c;
  ref_cfg.half_bandwidth.reset();
  const SurvivalOperator reference = survival_for(spec, ref_cfg, step);
  const bool finite_weight = !spec.any_flat();
  const Matrix continuum = finite_weight ? Matrix(kI * kernel_at(spec, 0.0)) : Matrix();

  std::vector<ScanRow> rows(ws.size());
  std::vector<std::exception_ptr> errors(ws.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ws.size(); i = next++) {
      try {
        ScanRow r;
        r.w = ws[i];
        r.m = modes_for(c, ws[i]);
        const DiscretizedBath bath = discretize_bath(spec, r.w, r.m);
        r.spacing = bath.spacing;
        r.recurrence = bath.recurrence_time();
        r.weight_error = finite_weight
                             ? operator_norm(discretized_weight(bath) - continuum) / operator_norm(continuum)
                             : std::nan("");
        const SurvivalOperator a = extract_survival(spec, bath, horizon, step);
        for (std::size_t k = 0; k < a.size(); ++k) {
          r.survival_error = std::max(r.survival_error, operator_norm(a.at(k) - reference.at(k)));
        }
        rows[i] = r;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned workers = std::min<unsigned>(worker_threads(), static_cast<unsigned>(ws.size()));
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::string csv = "W,M,spacing,recurrence_time,weight_rel_error,survival_max_error\n";
  for (const auto& r : rows) {
    csv += format_double(r.w) + "," + std::to_string(r.m) + "," + format_double(r.spacing) + "," +
           format_double(r.recurrence) + "," + (std::isnan(r.weight_error) ? "nan" : format_double(r.weight_error)) +
           "," + format_double(r.survival_error) + "\n";
    out << "bathscan: W=" << format_double(r.w) << " M=" << r.m
        << " survival_max_error=" << format_double(r.survival_error) << "\n";
  }
  write_atomic(fs::path(c.out) / "bathscan.csv", csv);
  return kExitOk;
}

void add_model(CLI::App* sub, Config& c) {
  sub->add_option("--model", c.model, "Model JSON file (see models/)")->required()->check(CLI::ExistingFile);
}
void add_out(CLI::App* sub, Config& c) {
  sub->add_option("--out", c.out, "Output directory (created if missing)")->capture_default_str();
}
void add_time(CLI::App* sub, Config& c, double default_step) {
  sub->add_option("--T", c.horizon, "Time horizon, in inverse units of the model energies")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--h", c.step, "Grid step, same time units (default " + format_double(default_step) + ")")
      ->check(CLI::PositiveNumber);
}
void add_bath(CLI::App* sub, Config& c) {
  sub->add_option("--W", c.half_bandwidth, "Bath half-bandwidth, energy units (default 20 where needed)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--M", c.modes, "Modes per channel at --W; M/W is kept fixed along --sweep (default 20 W)")
      ->check(CLI::Range(2, 1 << 30));
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::StepTooCoarse:
    case ErrorKind::SingularSurvival:
    case ErrorKind::BasisTooLarge:
    case ErrorKind::ConvergenceFailure:
    case ErrorKind::TruncationOverflow:
      return kExitNumeric;
    case ErrorKind::NotContractive:
      return kExitInvariant;
    default:
      return kExitConfig;
  }
}

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GSB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reduced dynamics, divisibility and regression checks for generalized spin-boson models"};
  app.name("gsb");
  // -h is taken by the grid step, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Config c;

  auto* solve = app.add_subcommand("solve", "Write the survival operator A(t) as CSV (survival.csv)");
  add_model(solve, c);
  add_time(solve, c, 1e-3);
  add_bath(solve, c);
  add_out(solve, c);

  auto* div = app.add_subcommand("divisibility", "Classify divisibility (divisibility.json, divisibility.csv)");
  add_model(div, c);
  add_time(div, c, 1e-3);
  add_bath(div, c);
  div->add_option("--tol", c.tol, "Relative slack of the norm monotonicity test (dimensionless)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  div->add_option("--seed", c.seed, "Seed of the trace-norm contraction scan")->capture_default_str();
  div->add_option("--samples", c.samples, "Random Hermitian inputs in the contraction scan")
      ->check(CLI::Range(1, 1 << 20))
      ->capture_default_str();
  add_out(div, c);

  auto* reg = app.add_subcommand("regression", "Regression gap on discretized baths (regression.json, sweep.csv)");
  add_model(reg, c);
  reg->add_option("--times", c.times, "Comma-separated increasing insertion times, time units")->capture_default_str();
  reg->add_option("--ops", c.ops, "Insertions: xbasis (matrix units, two times), identity, sigmax (X = sigma_x, Y = 1) or projector (X = Y = |e0><e0|)")->capture_default_str();
  reg->add_option("--rho", c.rho, "Initial system state: plus, excited or ground")->capture_default_str();
  reg->add_option("--sweep", c.sweep, "Comma-separated half-bandwidths W, energy units");
  reg->add_option("--nmax", c.n_max, "Excitation cap of the Fock space (0 picks the smallest that suffices)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  reg->add_option("--h", c.step, "Grid step of the reduced side, time units (default 0.01)")
      ->check(CLI::PositiveNumber);
  add_bath(reg, c);
  add_out(reg, c);

  auto* val = app.add_subcommand("validate", "Run the built-in invariant suite; exit 4 on any failure");
  val->add_option("--seed", c.seed, "Seed of the random channel draws")->capture_default_str();
  auto* val_out = val->add_option("--out", c.out, "Also write validate.json to this directory");

  auto* scan = app.add_subcommand("bathscan", "Discretization error of the bath over W (bathscan.csv)");
  add_model(scan, c);
  add_time(scan, c, 0.01);
  scan->add_option("--sweep", c.sweep, "Comma-separated half-bandwidths W, energy units (default 5,10,20,40)");
  add_bath(scan, c);
  add_out(scan, c);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*solve) return cmd_solve(c, out);
    if (*div) return cmd_divisibility(c, out);
    if (*reg) return cmd_regression(c, out);
    if (*val) return cmd_validate(c, val_out->count() > 0, out);
    if (*scan) return cmd_bathscan(c, out);
  } catch (const Error& e) {
    err << "gsb: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const InvariantViolation& e) {
    err << "gsb: invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "gsb: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitConfig;
}

}  // namespace gsb::cli
