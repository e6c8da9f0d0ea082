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

#include "qtraj/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "qtraj/ensemble.hpp"
#include "qtraj/master_eq.hpp"
#include "qtraj/models.hpp"

namespace qtraj::bench {

namespace {

template <class F>
double median_ms(std::size_t repeats, F&& body) {
  std::vector<double> samples;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, repeats); ++r) {
    const auto start = std::chrono::steady_clock::now();
    body();
    const auto stop = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  return n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

}  // namespace

double rms_error(const std::vector<std::vector<double>>& mc, const std::vector<std::vector<double>>& oracle) {
  if (mc.size() != oracle.size() || mc.empty()) {
    throw std::invalid_argument("rms_error: site counts differ");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < mc.size(); ++s) {
    if (mc[s].size() != oracle[s].size()) {
      throw std::invalid_argument("rms_error: series lengths differ");
    }
    for (std::size_t k = 1; k < mc[s].size(); ++k) {
      const double d = mc[s][k] - oracle[s][k];
      sum += d * d;
      ++count;
    }
  }
  if (count == 0) {
    throw std::invalid_argument("rms_error: need at least two grid times");
  }
  return std::sqrt(sum / static_cast<double>(count));
}

std::vector<BenchRow> sweep(const BenchConfig& config) {
  if (config.intervals < 1 || !(config.horizon > 0.0)) {
    throw std::invalid_argument("bench: need a positive horizon and at least one interval");
  }
  for (std::size_t n : config.sizes) {
    if (n < 2 || n > 24) {
      throw std::invalid_argument(fmt::format("bench: chain size {} outside [2, 24]", n));
    }
    const std::uint64_t entries = std::uint64_t{1} << n;
    if (entries > config.trajectory_entry_cap) {
      throw std::invalid_argument(
          fmt::format("bench: N={} needs {} state entries, above the cap {}", n, entries, config.trajectory_entry_cap));
    }
  }
  const auto grid = uniform_grid(0.0, config.horizon, config.intervals);
  std::vector<BenchRow> rows;
  for (std::size_t n : config.sizes) {
    BenchRow row;
    row.n = n;
    row.dim = std::size_t{1} << n;
    row.realizations = config.realizations;
    row.trajectory_entries = row.dim;
    row.oracle_entries = static_cast<std::uint64_t>(row.dim) * row.dim;

    models::ChainParams params;
    params.n = n;
    const TimeLocalModel model = models::build_chain(params);
    const ComplexVector psi0 = models::chain_initial_state(n);

    EnsembleConfig ens;
    ens.realizations = config.realizations;
    ens.master_seed = config.master_seed;
    ens.scheme = config.scheme;
    ens.grid = grid;
    ens.accumulate_density = false;
    for (std::size_t s = 0; s < n; ++s) {
      ens.observables.push_back(site_population(fmt::format("site{}", s + 1), s, n));
    }

    EnsembleEstimate est;
    ens.threads = 1;
    row.wall_ms_traj_1thread = median_ms(config.repeats, [&] { est = run(model, psi0, ens); });
    ens.threads = config.parallel_threads;
    row.wall_ms_traj_parallel = median_ms(config.repeats, [&] { est = run(model, psi0, ens); });

    if (row.oracle_entries <= config.oracle_entry_cap) {
      const HermitianMatrix rho0(outer(psi0, psi0));
      DensitySeries series;
      row.wall_ms_oracle = median_ms(config.repeats, [&] { series = integrate(model, rho0, grid, config.oracle_dt); });
      std::vector<std::vector<double>> mc;
      std::vector<std::vector<double>> exact;
      for (std::size_t s = 0; s < n; ++s) {
        mc.push_back(est.observables[s].mean);
        exact.push_back(expectation_series(series, ens.observables[s].op));
      }
      row.rms_error = rms_error(mc, exact);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qtraj::bench
