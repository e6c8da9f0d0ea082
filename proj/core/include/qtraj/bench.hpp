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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "qtraj/trajectory.hpp"

namespace qtraj::bench {

struct BenchConfig {
  std::vector<std::size_t> sizes{2, 3, 4, 5, 6};
  std::size_t realizations = 1000;
  std::uint64_t master_seed = 1;
  SchemeConfig scheme{JumpScheme::WaitingTime, Representation::Nonlinear, 0.005, 0.1};
  double horizon = 1.0;
  std::size_t intervals = 20;
  double oracle_dt = 0.002;
  /// Threads of the parallel trajectory column; 0 uses all hardware threads.
  unsigned parallel_threads = 0;
  std::size_t repeats = 3;
  /// Largest oracle density matrix, in complex entries (4^N).
  std::uint64_t oracle_entry_cap = std::uint64_t{1} << 20;
  /// Largest trajectory state vector, in complex entries (2^N).
  std::uint64_t trajectory_entry_cap = std::uint64_t{1} << 22;
};

struct BenchRow {
  std::size_t n = 0;
  std::size_t dim = 0;
  /// Absent when the oracle exceeded its memory cap.
  std::optional<double> wall_ms_oracle;
  double wall_ms_traj_1thread = 0.0;
  double wall_ms_traj_parallel = 0.0;
  std::size_t realizations = 0;
  /// Site-population RMS deviation from the oracle over all sites and all
  /// grid times after the initial one. Absent without an oracle.
  std::optional<double> rms_error;
  std::uint64_t oracle_entries = 0;
  std::uint64_t trajectory_entries = 0;
};

/// Runs the chain model with its default weights for each size. Timings are
/// medians over `repeats` runs and cover integration only. Throws
/// std::invalid_argument when a trajectory state would exceed its cap.
std::vector<BenchRow> sweep(const BenchConfig& config);

/// sqrt(mean over sites and grid times k >= 1 of (mc - oracle)^2).
double rms_error(const std::vector<std::vector<double>>& mc, const std::vector<std::vector<double>>& oracle);

}  // namespace qtraj::bench
