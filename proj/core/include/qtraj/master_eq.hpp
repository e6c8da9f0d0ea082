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

#pragma once

#include <span>
#include <vector>

#include "qtraj/linalg.hpp"
#include "qtraj/model.hpp"

namespace qtraj {

struct DensitySeries {
  std::vector<double> times;
  std::vector<HermitianMatrix> states;

  std::size_t size() const { return times.size(); }
};

struct IntegratorOptions {
  /// Fixed step, or the initial step in adaptive mode.
  double dt = 1e-3;
  /// Step doubling with local error control.
  bool adaptive = false;
  double rtol = 1e-8;
};

/// Integrates the master equation with classical RK4 and records rho at every
/// grid time. rho is Hermitized after each step; positivity is not enforced.
///
/// Steps never straddle a grid point: each interval is split into
/// ceil(width / dt) equal steps. Throws NonFiniteError with the time of
/// failure on blow-up.
DensitySeries integrate(const TimeLocalModel& model, const HermitianMatrix& rho0,
                        std::span<const double> grid, const IntegratorOptions& options);
DensitySeries integrate(const TimeLocalModel& model, const HermitianMatrix& rho0,
                        std::span<const double> grid, double dt);

/// max_k |Tr rho_k - 1|
double trace_drift(const DensitySeries& series);

std::vector<double> min_eigenvalues(const DensitySeries& series);
std::vector<double> expectation_series(const DensitySeries& series, const SparseOperator& observable);

/// t0, t0 + h, ..., t1 with `intervals` equal intervals.
std::vector<double> uniform_grid(double t0, double t1, std::size_t intervals);

}  // namespace qtraj
