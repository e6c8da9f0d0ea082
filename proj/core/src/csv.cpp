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

#include "qtraj/csv.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace qtraj::csv {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {}

void Table::add_row(std::span<const double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(std::move(cells));
}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw std::invalid_argument(fmt::format("csv: row has {} cells, header has {}", cells.size(), header_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::string Table::str() const {
  std::string out = fmt::format("{}\n", fmt::join(header_, ","));
  for (const auto& row : rows_) {
    out += fmt::format("{}\n", fmt::join(row, ","));
  }
  return out;
}

void Table::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  }
  const std::string text = str();
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) {
    throw std::runtime_error(fmt::format("write to {} failed", path.string()));
  }
}

Table mean_series(std::span<const double> grid, const MeanSeries& series) {
  if (grid.size() != series.size()) throw DimensionError("csv::mean_series: length mismatch");
  Table t({"t", "mean", "stderr"});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double row[] = {grid[k], series.mean[k], series.std_error[k]};
    t.add_row(row);
  }
  return t;
}

Table martingale(const EnsembleEstimate& estimate) {
  Table t({"t", "mean_mu", "stderr_mu"});
  for (std::size_t k = 0; k < estimate.grid.size(); ++k) {
    const double row[] = {estimate.grid[k], estimate.mu.mean[k], estimate.mu.std_error[k]};
    t.add_row(row);
  }
  return t;
}

Table comparison(std::span<const double> grid, std::span<const double> oracle, const MeanSeries& series) {
  if (grid.size() != series.size() || grid.size() != oracle.size()) {
    throw DimensionError("csv::comparison: length mismatch");
  }
  Table t({"t", "oracle", "mean", "stderr", "band", "inside"});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double band = series.band(k);
    const bool inside = std::abs(series.mean[k] - oracle[k]) <= band + 1e-12;
    t.add_row({format_number(grid[k]), format_number(oracle[k]), format_number(series.mean[k]),
               format_number(series.std_error[k]), format_number(band), inside ? "1" : "0"});
  }
  return t;
}

Table bench_rows(std::span<const bench::BenchRow> rows) {
  Table t({"N", "dim", "wall_ms_oracle", "wall_ms_traj_1thread", "wall_ms_traj_parallel", "M", "rms_error"});
  for (const auto& r : rows) {
    t.add_row({std::to_string(r.n), std::to_string(r.dim),
               r.wall_ms_oracle ? format_number(*r.wall_ms_oracle) : std::string(),
               format_number(r.wall_ms_traj_1thread), format_number(r.wall_ms_traj_parallel),
               std::to_string(r.realizations), r.rms_error ? format_number(*r.rms_error) : std::string()});
  }
  return t;
}

Table photocurrents(const std::vector<std::string>& channel_names, std::span<const PhotocurrentSeries> series) {
  if (channel_names.size() != series.size() || series.empty()) {
    throw std::invalid_argument("csv::photocurrents: one name per channel");
  }
  const bool with_oracle = !series.front().oracle.empty();
  std::vector<std::string> header{"t_start", "t_end"};
  for (const auto& name : channel_names) {
    header.push_back(name + "_mean");
    header.push_back(name + "_stderr");
    if (with_oracle) header.push_back(name + "_oracle");
  }
  Table t(std::move(header));
  const std::size_t bins = series.front().mean.size();
  for (std::size_t k = 0; k < bins; ++k) {
    std::vector<double> row{series.front().bin_start[k], series.front().bin_end[k]};
    for (const auto& s : series) {
      row.push_back(s.mean[k]);
      row.push_back(s.std_error[k]);
      if (with_oracle) row.push_back(s.oracle[k]);
    }
    t.add_row(row);
  }
  return t;
}

}  // namespace qtraj::csv
