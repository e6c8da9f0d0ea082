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


// Trajectory-level checks shared by the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "qtraj/master_eq.hpp"
#include "qtraj/trajectory.hpp"

namespace qtraj::testing {

/// Up to `max_jumps` jumps at uniform times in (0, t_end), random channels.
inline std::vector<JumpRecord> random_jump_record(std::mt19937_64& gen, std::size_t channels, double t_end,
                                                  int max_jumps) {
  std::uniform_int_distribution<int> count(0, max_jumps);
  std::uniform_int_distribution<std::size_t> pick(0, channels - 1);
  std::uniform_real_distribution<double> when(0.0, t_end);
  std::vector<double> times(static_cast<std::size_t>(count(gen)));
  for (auto& t : times) t = when(gen);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::vector<JumpRecord> out;
  for (double t : times) out.push_back({pick(gen), t, 1.0});
  return out;
}

/// Largest deviation between the normalized linear and the nonlinear
/// propagation of one jump record: state sup-norm and martingale.
struct PathwiseDeviation {
  double psi = 0.0;
  double mu = 0.0;
};

inline PathwiseDeviation pathwise_deviation(const TimeLocalModel& model, const ComplexVector& psi0,
                                            const std::vector<JumpRecord>& jumps, std::span<const double> grid,
                                            double dt) {
  const auto lin = propagate_linear(psi0, model, jumps, grid, dt);
  const auto non = propagate_nonlinear(psi0, model, jumps, grid, dt);
  PathwiseDeviation d;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const ComplexVector normalized = lin[k].phi / lin[k].phi.norm();
    d.psi = std::max(d.psi, (normalized - non[k].psi).cwiseAbs().maxCoeff());
    d.mu = std::max(d.mu, std::abs(lin[k].mu - non[k].mu) / std::max(1.0, std::abs(non[k].mu)));
  }
  return d;
}

/// Largest one-step gap between the propagated martingale and an explicit
/// Euler update mu_k (1 + h sum_l (r_l - w_l) <K_l>) started from the same
/// point. Steps containing a jump are skipped.
inline double euler_local_gap(const TimeLocalModel& model, const ComplexVector& psi0,
                              const std::vector<JumpRecord>& jumps, double t_end, double dt) {
  const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
  const auto grid = uniform_grid(0.0, t_end, n);
  const auto path = propagate_nonlinear(psi0, model, jumps, grid, dt);
  double gap = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const bool jumped = std::any_of(jumps.begin(), jumps.end(),
                                    [&](const JumpRecord& j) { return j.time > grid[k] && j.time <= grid[k + 1]; });
    if (jumped) continue;
    const auto c = model.coefficients(grid[k]);
    double drift = 0.0;
    for (std::size_t l = 0; l < model.channel_count(); ++l) {
      drift += (c.rate[l] - c.weight[l]) * expectation(model.number(l), path[k].psi);
    }
    const double euler = path[k].mu * (1.0 + (grid[k + 1] - grid[k]) * drift);
    gap = std::max(gap, std::abs(path[k + 1].mu - euler) / std::max(1.0, std::abs(path[k].mu)));
  }
  return gap;
}

/// First jump time of each of `samples` trajectories, or `horizon` if none.
inline std::vector<double> first_jump_times(const TimeLocalModel& model, const ComplexVector& psi0,
                                            const SchemeConfig& scheme, std::size_t samples, std::uint64_t seed,
                                            double horizon) {
  TrajectoryStepper stepper(model, scheme);
  std::vector<double> out;
  out.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    RandomStream rng(seed, i);
    TrajectoryState state = TrajectoryState::initial(psi0);
    while (state.jumps.empty() && state.t < horizon - 1e-12) {
      stepper.step(state, rng, std::min(scheme.dt, horizon - state.t));
    }
    out.push_back(state.jumps.empty() ? horizon : state.jumps.front().time);
  }
  return out;
}

/// Total probability of the jump records with at most `max_jumps` jumps on
/// (0, t_end), by nested Gauss-Legendre quadrature over ordered jump times
/// and a sum over channels.
template <unsigned Points = 12>
double record_probability(const TimeLocalModel& model, const ComplexVector& z, double t_end, int max_jumps,
                          double dt, std::vector<double>* by_count = nullptr) {
  using Rule = boost::math::quadrature::gauss<double, Points>;
  std::vector<JumpRecord> record;
  std::function<double(int, double)> level = [&](int remaining, double lo) -> double {
    if (remaining == 0) {
      return waiting_time_density(model, z, record, t_end, dt);
    }
    double total = 0.0;
    for (std::size_t l = 0; l < model.channel_count(); ++l) {
      total += Rule::integrate(
          [&](double s) {
            record.push_back({l, s, 1.0});
            const double v = level(remaining - 1, s);
            record.pop_back();
            return v;
          },
          lo, t_end);
    }
    return total;
  };
  double sum = 0.0;
  for (int n = 0; n <= max_jumps; ++n) {
    const double p = level(n, 0.0);
    if (by_count) by_count->push_back(p);
    sum += p;
  }
  return sum;
}

}  // namespace qtraj::testing
