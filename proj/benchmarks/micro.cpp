// Copyright 2026 The qtraj Authors
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


#include <cstddef>
#include <string>

#include <benchmark/benchmark.h>

#include "qtraj/model.hpp"
#include "qtraj/models.hpp"
#include "qtraj/rng.hpp"
#include "qtraj/trajectory.hpp"

namespace {

qtraj::TimeLocalModel chain(std::size_t n) {
  qtraj::models::ChainParams p;
  p.n = n;
  return qtraj::models::build_chain(p);
}

void BM_LgksRhs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = chain(n);
  const qtraj::ComplexVector psi = qtraj::models::chain_initial_state(n);
  const qtraj::ComplexMatrix rho = psi * psi.adjoint();
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qtraj::lgks_rhs(m, rho, t));
    t += 1e-3;
  }
  state.SetLabel("d=" + std::to_string(m.dim()));
}
BENCHMARK(BM_LgksRhs)->DenseRange(2, 6, 2);

void BM_TrajectoryStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = chain(n);
  qtraj::SchemeConfig scheme;
  scheme.scheme = state.range(1) == 0 ? qtraj::JumpScheme::Bernoulli : qtraj::JumpScheme::WaitingTime;
  scheme.dt = 1e-3;
  qtraj::TrajectoryStepper stepper(m, scheme);
  qtraj::RandomStream rng(1, 0);
  const auto initial = qtraj::TrajectoryState::initial(qtraj::models::chain_initial_state(n));
  auto s = initial;
  for (auto _ : state) {
    stepper.step(s, rng);
    // Restart before the modulated weights run far from the usual horizon.
    if (s.t > 2.0) s = initial;
  }
}
BENCHMARK(BM_TrajectoryStep)->ArgsProduct({{2, 4, 6, 8}, {0, 1}});

}  // namespace

BENCHMARK_MAIN();
