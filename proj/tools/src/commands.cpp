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

#include "qtraj_cli/commands.hpp"

#include <chrono>
#include <cstdint>
#include <cmath>
#include <fstream>
#include <ostream>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "qtraj/csv.hpp"
#include "qtraj/ensemble.hpp"
#include "qtraj/master_eq.hpp"
#include "qtraj_cli/config.hpp"

namespace qtraj::cli {

namespace {

using json = nlohmann::json;

// Oracle steps per record interval used for photocurrent bin averages.
constexpr std::size_t kOracleRefine = 8;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void apply(RunConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.out) cfg.out_dir = *o.out;
}

EnsembleConfig ensemble_config(const RunConfig& cfg) {
  EnsembleConfig ens;
  ens.realizations = cfg.realizations;
  ens.master_seed = cfg.seed;
  ens.scheme = cfg.scheme;
  ens.grid = cfg.grid();
  ens.observables = cfg.setup.observables;
  ens.accumulate_density = false;
  ens.threads = cfg.threads;
  return ens;
}

bool load_or_report(const std::filesystem::path& path, RunConfig& cfg, std::ostream& err) {
  try {
    cfg = load_run_config(path);
    return true;
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
  } catch (const std::exception& e) {
    fmt::print(err, "config error: {}: {}\n", path.string(), e.what());
  }
  return false;
}

bool report_violations(const TimeLocalModel& model, double horizon, std::ostream& out) {
  ValidationOptions options;
  options.fallback_horizon = horizon;
  const auto report = validate(model, options);
  for (const auto& v : report.violations) fmt::print(out, "violation: {}\n", v);
  return report.ok();
}

}  // namespace

int cmd_run(const std::filesystem::path& config, const Overrides& overrides, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (!load_or_report(config, cfg, err)) return exit_code::kConfig;
  apply(cfg, overrides);
  const TimeLocalModel& model = *cfg.setup.model;
  if (!report_violations(model, cfg.horizon, err)) return exit_code::kViolations;

  const auto grid = cfg.grid();
  const bool want_oracle = cfg.method != Method::Trajectories;
  const bool want_ensemble = cfg.method != Method::Oracle;
  const auto& observables = cfg.setup.observables;

  std::optional<DensitySeries> fine;
  std::optional<DensitySeries> oracle;
  std::optional<EnsembleEstimate> est;
  try {
    if (want_oracle) {
      const auto start = std::chrono::steady_clock::now();
      const auto fine_grid = uniform_grid(0.0, cfg.horizon, cfg.intervals * kOracleRefine);
      fine = integrate(model, HermitianMatrix(outer(cfg.setup.psi0, cfg.setup.psi0)), fine_grid, cfg.oracle_dt);
      DensitySeries coarse;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        coarse.times.push_back(grid[k]);
        coarse.states.push_back(fine->states[k * kOracleRefine]);
      }
      oracle = std::move(coarse);
      fmt::print(err, "oracle: {:.1f} ms\n", elapsed_ms(start));
    }
    if (want_ensemble) {
      const auto start = std::chrono::steady_clock::now();
      est = run(model, cfg.setup.psi0, ensemble_config(cfg));
      fmt::print(err, "trajectories: {} realizations in {:.1f} ms\n", cfg.realizations, elapsed_ms(start));
    }
  } catch (const TrajectoryAbort& e) {
    fmt::print(err, "simulation aborted: {}\nreplay: qtraj replay --config {} --seed {} --index {}\n", e.what(),
               config.string(), e.master_seed(), e.trajectory_index());
    return exit_code::kAbort;
  } catch (const NonFiniteError& e) {
    fmt::print(err, "simulation aborted: oracle {} (t={})\n", e.what(), e.time());
    return exit_code::kAbort;
  } catch (const Error& e) {
    fmt::print(err, "simulation aborted: {}\n", e.what());
    return exit_code::kAbort;
  }

  // Everything is computed; only now touch the file system.
  std::vector<std::pair<std::string, csv::Table>> files;
  json summary;
  summary["config"] = cfg.echo;
  json model_info;
  model_info["name"] = cfg.setup.name;
  model_info["dim"] = model.dim();
  std::vector<std::string> channel_names;
  for (const auto& ch : model.channels()) channel_names.push_back(ch.name);
  model_info["channels"] = channel_names;
  summary["model"] = model_info;
  summary["grid"] = {{"horizon", cfg.horizon}, {"intervals", cfg.intervals}};

  std::vector<std::vector<double>> oracle_values;
  if (oracle) {
    std::vector<std::string> header{"t"};
    for (const auto& o : observables) {
      header.push_back(o.name);
      oracle_values.push_back(expectation_series(*oracle, o.op));
    }
    header.push_back("trace");
    header.push_back("min_eigenvalue");
    const auto min_eigs = min_eigenvalues(*oracle);
    csv::Table table(header);
    double first_negative = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < grid.size(); ++k) {
      std::vector<double> row{grid[k]};
      for (const auto& v : oracle_values) row.push_back(v[k]);
      row.push_back(oracle->states[k].trace().real());
      row.push_back(min_eigs[k]);
      table.add_row(row);
      if (std::isnan(first_negative) && min_eigs[k] < 0.0) first_negative = grid[k];
    }
    files.emplace_back("oracle.csv", std::move(table));
    summary["oracle"] = {{"trace_drift", trace_drift(*oracle)},
                         {"min_eigenvalue", *std::min_element(min_eigs.begin(), min_eigs.end())},
                         {"first_negative_time", number_or_null(first_negative)}};
  }

  if (est) {
    for (std::size_t o = 0; o < observables.size(); ++o) {
      files.emplace_back(fmt::format("observable_{}.csv", observables[o].name),
                         csv::mean_series(grid, est->observables[o]));
    }
    files.emplace_back("martingale.csv", csv::martingale(*est));
    if (model.channel_count() > 0) {
      std::vector<PhotocurrentSeries> pcs;
      for (std::size_t l = 0; l < model.channel_count(); ++l) {
        pcs.push_back(photocurrent(*est, model, l, fine ? &*fine : nullptr));
      }
      files.emplace_back("photocurrent.csv", csv::photocurrents(channel_names, pcs));
    }
    json ens;
    ens["realizations"] = cfg.realizations;
    ens["seed"] = cfg.seed;
    ens["total_jumps"] = est->total_jumps;
    // Trailing empty bins carry no information.
    std::vector<std::uint64_t> histogram = est->jump_histogram;
    while (histogram.size() > 1 && histogram.back() == 0) histogram.pop_back();
    ens["jump_histogram"] = histogram;
    ens["martingale_diagnostic"] =
        cfg.realizations >= 100 ? number_or_null(martingale_diagnostic(*est)) : json(nullptr);
    ens["max_mean_abs_mu"] = *std::max_element(est->mu_abs.mean.begin(), est->mu_abs.mean.end());
    summary["ensemble"] = ens;
  }

  if (oracle && est) {
    json cmp = json::object();
    for (std::size_t o = 0; o < observables.size(); ++o) {
      const auto& name = observables[o].name;
      files.emplace_back(fmt::format("compare_{}.csv", name),
                         csv::comparison(grid, oracle_values[o], est->observables[o]));
      const auto violations = band_violations(oracle_values[o], est->observables[o]);
      cmp[name] = {{"points", grid.size()},
                   {"outside_band", violations},
                   {"coverage", band_coverage(oracle_values[o], est->observables[o])}};
      fmt::print(out, "{}: {} of {} points outside the 2-stderr band\n", name, violations, grid.size());
    }
    summary["comparison"] = cmp;
  }

  try {
    std::filesystem::create_directories(cfg.out_dir);
    for (const auto& [name, table] : files) table.write(cfg.out_dir / name);
    write_text(cfg.out_dir / "summary.json", summary.dump(2) + "\n");
  } catch (const std::exception& e) {
    fmt::print(err, "output error: {}\n", e.what());
    return exit_code::kConfig;
  }
  fmt::print(out, "wrote {} files to {}\n", files.size() + 1, cfg.out_dir.string());
  return exit_code::kOk;
}

int cmd_bench(const std::filesystem::path& config, const Overrides& overrides, std::ostream& out,
              std::ostream& err) {
  BenchFileConfig cfg;
  try {
    cfg = load_bench_config(config);
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return exit_code::kConfig;
  }
  if (overrides.seed) cfg.bench.master_seed = *overrides.seed;
  if (overrides.threads) cfg.bench.parallel_threads = *overrides.threads;
  if (overrides.out) cfg.out_dir = *overrides.out;
  std::vector<bench::BenchRow> rows;
  try {
    rows = bench::sweep(cfg.bench);
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return exit_code::kConfig;
  } catch (const TrajectoryAbort& e) {
    fmt::print(err, "simulation aborted: {}\n", e.what());
    return exit_code::kAbort;
  } catch (const Error& e) {
    fmt::print(err, "simulation aborted: {}\n", e.what());
    return exit_code::kAbort;
  }
  const auto table = csv::bench_rows(rows);
  try {
    std::filesystem::create_directories(cfg.out_dir);
    table.write(cfg.out_dir / cfg.file_name);
  } catch (const std::exception& e) {
    fmt::print(err, "output error: {}\n", e.what());
    return exit_code::kConfig;
  }
  fmt::print(out, "{}", table.str());
  return exit_code::kOk;
}

int cmd_validate(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  ModelSetup setup;
  try {
    setup = load_model(config);
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return exit_code::kConfig;
  } catch (const std::exception& e) {
    fmt::print(err, "config error: {}: {}\n", config.string(), e.what());
    return exit_code::kConfig;
  }
  if (!report_violations(*setup.model, 1.0, out)) return exit_code::kViolations;
  fmt::print(out, "model {} ok\n", setup.name);
  return exit_code::kOk;
}

int cmd_replay(const std::filesystem::path& config, std::uint64_t index, const Overrides& overrides,
               std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (!load_or_report(config, cfg, err)) return exit_code::kConfig;
  apply(cfg, overrides);
  const TimeLocalModel& model = *cfg.setup.model;
  if (!report_violations(model, cfg.horizon, err)) return exit_code::kViolations;
  TrajectoryRecord rec;
  try {
    rec = replay(model, cfg.setup.psi0, ensemble_config(cfg), index);
  } catch (const Error& e) {
    fmt::print(err, "trajectory {} (seed {}) fails: {}\n", index, cfg.seed, e.what());
    return exit_code::kAbort;
  }
  std::vector<std::string> header{"t", "mu"};
  for (const auto& o : cfg.setup.observables) header.push_back(o.name);
  csv::Table path(header);
  for (std::size_t k = 0; k < rec.grid.size(); ++k) {
    std::vector<double> row{rec.grid[k], rec.mu[k]};
    for (const auto& o : cfg.setup.observables) row.push_back(expectation(o.op, rec.psi[k]));
    path.add_row(row);
  }
  csv::Table jumps({"time", "channel", "mu"});
  for (const auto& j : rec.jumps) {
    jumps.add_row({csv::format_number(j.time), model.channel(j.channel).name, csv::format_number(j.mu)});
  }
  try {
    std::filesystem::create_directories(cfg.out_dir);
    path.write(cfg.out_dir / fmt::format("trajectory_{}.csv", index));
    jumps.write(cfg.out_dir / fmt::format("jumps_{}.csv", index));
  } catch (const std::exception& e) {
    fmt::print(err, "output error: {}\n", e.what());
    return exit_code::kConfig;
  }
  fmt::print(out, "trajectory {} of seed {}: {} jumps\n", index, cfg.seed, rec.jumps.size());
  return exit_code::kOk;
}

}  // namespace qtraj::cli
