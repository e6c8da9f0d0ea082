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

#include "qtraj/master_eq.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace qtraj {

namespace {

void check_grid(const TimeLocalModel& model, std::span<const double> grid) {
  if (grid.empty()) {
    throw std::invalid_argument("integrate: empty time grid");
  }
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) {
      throw std::invalid_argument("integrate: grid must be strictly increasing");
    }
  }
  if (grid.back() > model.horizon() * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        fmt::format("integrate: grid ends at {} beyond the model horizon {}", grid.back(), model.horizon()));
  }
}

ComplexMatrix rk4_step(const TimeLocalModel& model, const ComplexMatrix& rho, double t, double h) {
  const ComplexMatrix k1 = lgks_rhs(model, rho, t);
  const ComplexMatrix k2 = lgks_rhs(model, rho + (0.5 * h) * k1, t + 0.5 * h);
  const ComplexMatrix k3 = lgks_rhs(model, rho + (0.5 * h) * k2, t + 0.5 * h);
  const ComplexMatrix k4 = lgks_rhs(model, rho + h * k3, t + h);
  ComplexMatrix next = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return 0.5 * (next + next.adjoint());
}

void check_finite(const ComplexMatrix& rho, double t) {
  if (!all_finite(rho)) {
    throw NonFiniteError(fmt::format("master equation state is not finite at t={}", t), t);
  }
}

}  // namespace

DensitySeries integrate(const TimeLocalModel& model, const HermitianMatrix& rho0,
                        std::span<const double> grid, const IntegratorOptions& options) {
  if (!(options.dt > 0.0)) {
    throw std::invalid_argument("integrate: dt must be positive");
  }
  if (rho0.dim() != static_cast<Eigen::Index>(model.dim())) {
    throw DimensionError("integrate: rho0 dimension does not match the model");
  }
  if (std::abs(rho0.trace() - 1.0) > 1e-12) {
    throw std::invalid_argument("integrate: rho0 must have unit trace");
  }
  check_grid(model, grid);

  DensitySeries out;
  out.times.assign(grid.begin(), grid.end());
  out.states.reserve(grid.size());
  out.states.push_back(rho0);

  ComplexMatrix rho = rho0.matrix();
  double t = grid.front();
  double h_adaptive = options.dt;

  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double target = grid[k];
    if (!options.adaptive) {
      const double width = target - t;
      const auto steps = static_cast<long>(std::max(1.0, std::ceil(width / options.dt - 1e-9)));
      const double h = width / static_cast<double>(steps);
      for (long s = 0; s < steps; ++s) {
        rho = rk4_step(model, rho, t, h);
        t = grid[k - 1] + static_cast<double>(s + 1) * h;
        check_finite(rho, t);
      }
    } else {
      // Step doubling: one step of h against two of h/2, Richardson-corrected.
      while (t < target) {
        const double h = std::min(h_adaptive, target - t);
        const ComplexMatrix full = rk4_step(model, rho, t, h);
        const ComplexMatrix half = rk4_step(model, rk4_step(model, rho, t, 0.5 * h), t + 0.5 * h, 0.5 * h);
        const double scale = std::max(max_abs(half), 1e-300);
        const double err = max_abs(half - full) / 15.0 / scale;
        check_finite(half, t + h);
        if (err <= options.rtol || h < 1e-12) {
          rho = half + (half - full) / 15.0;
          rho = 0.5 * (rho + rho.adjoint());
          t = (target - t - h <= 1e-14 * std::max(1.0, std::abs(target))) ? target : t + h;
        }
        const double factor = err > 0.0 ? 0.9 * std::pow(options.rtol / err, 0.2) : 4.0;
        h_adaptive = h * std::clamp(factor, 0.2, 4.0);
      }
    }
    t = target;
    out.states.push_back(HermitianMatrix::symmetrized(rho));
  }
  return out;
}

DensitySeries integrate(const TimeLocalModel& model, const HermitianMatrix& rho0,
                        std::span<const double> grid, double dt) {
  IntegratorOptions options;
  options.dt = dt;
  return integrate(model, rho0, grid, options);
}

double trace_drift(const DensitySeries& series) {
  if (series.states.empty()) {
    throw std::invalid_argument("trace_drift: empty series");
  }
  double drift = 0.0;
  for (const auto& s : series.states) {
    drift = std::max(drift, std::abs(s.trace() - 1.0));
  }
  return drift;
}

std::vector<double> min_eigenvalues(const DensitySeries& series) {
  std::vector<double> out;
  out.reserve(series.size());
  for (const auto& s : series.states) {
    out.push_back(min_eigenvalue(s));
  }
  return out;
}

std::vector<double> expectation_series(const DensitySeries& series, const SparseOperator& observable) {
  std::vector<double> out;
  out.reserve(series.size());
  for (const auto& s : series.states) {
    // Tr(O rho)
    const ComplexMatrix prod = observable * s.matrix();
    out.push_back(prod.trace().real());
  }
  return out;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t intervals) {
  if (intervals == 0 || !(t1 > t0)) {
    throw std::invalid_argument("uniform_grid: need t1 > t0 and at least one interval");
  }
  std::vector<double> g(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    g[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(intervals);
  }
  g.back() = t1;
  return g;
}

}  // namespace qtraj
