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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qtraj/bench.hpp"
#include "qtraj/ensemble.hpp"

namespace qtraj::csv {

/// Shortest round-trip form, or "nan" / "inf" / "-inf".
std::string format_number(double x);

/// Comma-separated, header row, LF line endings.
class Table {
 public:
  explicit Table(std::vector<std::string> header);

  void add_row(std::span<const double> values);
  void add_row(std::vector<std::string> cells);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }

  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// t, mean, stderr
Table mean_series(std::span<const double> grid, const MeanSeries& series);
/// t, mean_mu, stderr_mu
Table martingale(const EnsembleEstimate& estimate);
/// t, oracle, mean, stderr, band, inside
Table comparison(std::span<const double> grid, std::span<const double> oracle, const MeanSeries& series);
/// N, dim, wall_ms_oracle, wall_ms_traj_1thread, wall_ms_traj_parallel, M, rms_error
Table bench_rows(std::span<const bench::BenchRow> rows);
/// t_start, t_end, then mean and stderr per channel, and the oracle bin average
/// per channel when available.
Table photocurrents(const std::vector<std::string>& channel_names, std::span<const PhotocurrentSeries> series);

}  // namespace qtraj::csv
