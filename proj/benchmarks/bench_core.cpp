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
#include <benchmark/benchmark.h>

#include "gsb/channels.hpp"
#include "gsb/divisibility.hpp"
#include "gsb/dynamics.hpp"
#include "gsb/fock.hpp"
#include "gsb/regression.hpp"

using namespace gsb;

namespace {

ModelSpec three_level() {
  ModelSpec spec;
  spec.h_excited = Matrix{{0.0, 0.2, 0.0}, {0.2, 0.5, 0.1}, {0.0, 0.1, -0.3}};
  spec.betas = {Vector{{1.0, 0.5, 0.0}}, Vector{{0.0, 0.3, 1.0}}};
  spec.form_factors = {FormFactor::lorentzian(1.0, 1.0), FormFactor::box_window(0.5, 4.0)};
  return spec;
}

void BM_VolterraQubit(benchmark::State& state) {
  const ModelSpec spec = qubit_model(0.0, FormFactor::lorentzian(1.0, 1.0));
  const double h = 5.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_survival(spec, 5.0, h));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_VolterraQubit)->Arg(1000)->Arg(2000)->Arg(4000)->Arg(8000)->Complexity(benchmark::oNSquared);

void BM_VolterraThreeLevel(benchmark::State& state) {
  const ModelSpec spec = three_level();
  for (auto _ : state) benchmark::DoNotOptimize(solve_survival(spec, 5.0, 2e-3));
}
BENCHMARK(BM_VolterraThreeLevel);

void BM_Classify(benchmark::State& state) {
  const SurvivalOperator a = solve_survival(three_level(), 5.0, 2e-3);
  for (auto _ : state) benchmark::DoNotOptimize(classify(a));
}
BENCHMARK(BM_Classify);

void BM_BasisBuild(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(FockBasis::build(1, static_cast<std::size_t>(state.range(0)), 2));
}
BENCHMARK(BM_BasisBuild)->Arg(200)->Arg(400);

void BM_ChebyshevEvolve(benchmark::State& state) {
  const ModelSpec spec = qubit_model(0.0, FormFactor::flat(1.0));
  const FockModel model(spec, discretize_bath(spec, 10.0, static_cast<int>(state.range(0))), 2);
  Vector sys(2);
  sys << 1.0, 1.0;
  const JointState psi = model.product_state(sys.normalized());
  for (auto _ : state) benchmark::DoNotOptimize(model.evolve(psi, 1.0));
}
BENCHMARK(BM_ChebyshevEvolve)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ChoiPositivity(benchmark::State& state) {
  Matrix a(3, 3);
  a << 0.3, 0.1, 0.0, -0.2, 0.5, 0.3, 0.1, 0.0, 0.6;
  for (auto _ : state) benchmark::DoNotOptimize(is_positive_map(a));
}
BENCHMARK(BM_ChoiPositivity);

}  // namespace

BENCHMARK_MAIN();
