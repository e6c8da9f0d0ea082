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

#include "qtraj/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include <fmt/format.h>

namespace qtraj {

namespace {

constexpr std::size_t kHistogramBins = 64;

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }

  static Moments merge(const Moments& a, const Moments& b) {
    if (a.n == 0.0) return b;
    if (b.n == 0.0) return a;
    Moments out;
    out.n = a.n + b.n;
    const double d = b.mean - a.mean;
    out.mean = a.mean + d * (b.n / out.n);
    out.m2 = a.m2 + b.m2 + d * d * (a.n * b.n / out.n);
    return out;
  }
};

// Accumulated statistics of a contiguous range of trajectories.
struct Block {
  double n = 0.0;
  std::vector<ComplexMatrix> rho_plus;
  std::vector<ComplexMatrix> rho_minus;
  std::vector<std::vector<Moments>> observables;
  std::vector<Moments> mu;
  std::vector<Moments> mu_abs;
  std::vector<std::vector<Moments>> photocurrent;
  std::vector<Moments> flux;
  std::vector<std::uint64_t> histogram;
  std::uint64_t total_jumps = 0;
};

Block empty_block(const TimeLocalModel& model, const EnsembleConfig& config, bool with_flux) {
  const std::size_t points = config.grid.size();
  const std::size_t bins = points - 1;
  const auto d = static_cast<Eigen::Index>(model.dim());
  Block b;
  if (config.accumulate_density) {
    b.rho_plus.assign(points, ComplexMatrix::Zero(d, d));
    b.rho_minus.assign(points, ComplexMatrix::Zero(d, d));
  }
  b.observables.assign(config.observables.size(), std::vector<Moments>(points));
  b.mu.assign(points, {});
  b.mu_abs.assign(points, {});
  b.photocurrent.assign(model.channel_count(), std::vector<Moments>(bins));
  if (with_flux) {
    b.flux.assign(bins, {});
  }
  b.histogram.assign(kHistogramBins + 1, 0);
  return b;
}

void merge_matrix_mean(ComplexMatrix& a, double na, const ComplexMatrix& b, double nb) {
  a += (b - a) * (nb / (na + nb));
}

Block merge(Block a, const Block& b) {
  if (b.n == 0.0) return a;
  if (a.n == 0.0) return b;
  for (std::size_t k = 0; k < a.rho_plus.size(); ++k) {
    merge_matrix_mean(a.rho_plus[k], a.n, b.rho_plus[k], b.n);
    merge_matrix_mean(a.rho_minus[k], a.n, b.rho_minus[k], b.n);
  }
  auto merge_all = [](std::vector<Moments>& x, const std::vector<Moments>& y) {
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = Moments::merge(x[k], y[k]);
  };
  for (std::size_t o = 0; o < a.observables.size(); ++o) merge_all(a.observables[o], b.observables[o]);
  merge_all(a.mu, b.mu);
  merge_all(a.mu_abs, b.mu_abs);
  for (std::size_t l = 0; l < a.photocurrent.size(); ++l) merge_all(a.photocurrent[l], b.photocurrent[l]);
  merge_all(a.flux, b.flux);
  for (std::size_t h = 0; h < a.histogram.size(); ++h) a.histogram[h] += b.histogram[h];
  a.total_jumps += b.total_jumps;
  a.n += b.n;
  return a;
}

// Fixed pairwise tree over block indices.
Block reduce(std::vector<Block>& blocks, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return std::move(blocks[lo]);
  const std::size_t mid = lo + (hi - lo) / 2;
  return merge(reduce(blocks, lo, mid), reduce(blocks, mid, hi));
}

MeanSeries finish(const std::vector<Moments>& moments) {
  MeanSeries s;
  s.mean.reserve(moments.size());
  s.std_error.reserve(moments.size());
  s.std_dev.reserve(moments.size());
  for (const auto& m : moments) {
    const double sd = m.n > 1.0 ? std::sqrt(std::max(0.0, m.m2) / (m.n - 1.0)) : 0.0;
    s.mean.push_back(m.mean);
    s.std_dev.push_back(sd);
    s.std_error.push_back(m.n > 0.0 ? sd / std::sqrt(m.n) : 0.0);
  }
  return s;
}

bool has_energy_quanta(const TimeLocalModel& model) {
  if (model.channel_count() == 0) return false;
  return std::all_of(model.channels().begin(), model.channels().end(),
                     [](const Channel& c) { return c.energy_quantum.has_value(); });
}

// Runs trajectory `index` and folds it into `block`.
void simulate_into(Block& block, TrajectoryStepper& stepper, const TimeLocalModel& model,
                   const ComplexVector& psi0, const EnsembleConfig& config, std::size_t index,
                   TrajectoryRecord* record) {
  const auto& grid = config.grid;
  const std::size_t bins = grid.size() - 1;
  const std::size_t channels = model.channel_count();
  const bool with_flux = !block.flux.empty();
  RandomStream rng(config.master_seed, index);
  TrajectoryState state = TrajectoryState::initial(psi0, grid.front(), config.scheme.representation);

  std::vector<double> bin_sum(channels * bins, 0.0);
  std::uint64_t jumps = 0;

  auto observe = [&](std::size_t k) {
    const double mu = state.mu();
    block.mu[k].add(mu);
    block.mu_abs[k].add(std::abs(mu));
    for (std::size_t o = 0; o < config.observables.size(); ++o) {
      block.observables[o][k].add(mu * expectation(config.observables[o].op, state.psi));
    }
    if (config.accumulate_density) {
      const ComplexMatrix pp = outer(state.psi, state.psi);
      const double plus = std::max(0.0, mu);
      const double minus = std::max(0.0, -mu);
      block.rho_plus[k] += (plus * pp - block.rho_plus[k]) / (block.n + 1.0);
      block.rho_minus[k] += (minus * pp - block.rho_minus[k]) / (block.n + 1.0);
    }
    if (record != nullptr) {
      record->psi.push_back(state.psi);
      record->mu.push_back(mu);
    }
  };

  observe(0);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    stepper.advance_to(state, grid[k], rng);
    for (const auto& j : state.jumps) {
      bin_sum[j.channel * bins + (k - 1)] += j.mu;
    }
    jumps += state.jumps.size();
    if (record != nullptr) {
      record->jumps.insert(record->jumps.end(), state.jumps.begin(), state.jumps.end());
    }
    state.jumps.clear();
    observe(k);
  }

  for (std::size_t k = 0; k < bins; ++k) {
    const double width = grid[k + 1] - grid[k];
    double flux = 0.0;
    for (std::size_t l = 0; l < channels; ++l) {
      const double value = bin_sum[l * bins + k] / width;
      block.photocurrent[l][k].add(value);
      if (with_flux) flux += *model.channel(l).energy_quantum * value;
    }
    if (with_flux) block.flux[k].add(flux);
  }
  block.histogram[std::min<std::uint64_t>(jumps, kHistogramBins)] += 1;
  block.total_jumps += jumps;
  block.n += 1.0;
}

std::size_t find_time(std::span<const double> times, double t) {
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  const auto it = std::lower_bound(times.begin(), times.end(), t - tol);
  if (it == times.end() || std::abs(*it - t) > tol) {
    throw std::invalid_argument(fmt::format("time {} is not on the oracle grid", t));
  }
  return static_cast<std::size_t>(it - times.begin());
}

}  // namespace

Observable make_observable(std::string name, const ComplexMatrix& op) {
  const HermitianMatrix h(op);
  return {std::move(name), to_sparse(h.matrix())};
}

Observable projector_observable(std::string name, const ComplexVector& v) {
  if (std::abs(v.squaredNorm() - 1.0) > 1e-10) {
    throw std::invalid_argument("projector_observable: vector is not normalized");
  }
  return {std::move(name), to_sparse(outer(v, v))};
}

Observable basis_projector(std::string name, std::size_t index, std::size_t dim) {
  if (index >= dim) {
    throw std::out_of_range("basis_projector: index");
  }
  SparseOperator p(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  p.insert(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
  p.makeCompressed();
  return {std::move(name), p};
}

Observable site_population(std::string name, std::size_t site, std::size_t num_sites) {
  const SparseOperator n = qubit::sigma_plus() * qubit::sigma_minus();
  return {std::move(name), embed_site(n, site, num_sites)};
}

void EnsembleConfig::validate(const TimeLocalModel& model) const {
  scheme.validate();
  if (realizations < 1) {
    throw std::invalid_argument("EnsembleConfig: realizations must be at least 1");
  }
  if (block_size < 1) {
    throw std::invalid_argument("EnsembleConfig: block_size must be at least 1");
  }
  if (grid.empty()) {
    throw std::invalid_argument("EnsembleConfig: empty grid");
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k])) throw std::invalid_argument("EnsembleConfig: grid is not finite");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw std::invalid_argument("EnsembleConfig: grid must increase");
  }
  if (grid.back() > model.horizon() * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        fmt::format("EnsembleConfig: grid ends at {} beyond the model horizon {}", grid.back(), model.horizon()));
  }
  const auto d = static_cast<Eigen::Index>(model.dim());
  for (const auto& o : observables) {
    if (o.op.rows() != d || o.op.cols() != d) {
      throw DimensionError(fmt::format("observable {} has the wrong dimension", o.name));
    }
  }
}

std::size_t EnsembleEstimate::observable_index(const std::string& name) const {
  const auto it = std::find(observable_names.begin(), observable_names.end(), name);
  if (it == observable_names.end()) {
    throw std::out_of_range(fmt::format("no observable named {}", name));
  }
  return static_cast<std::size_t>(it - observable_names.begin());
}

EnsembleEstimate run(const TimeLocalModel& model, const ComplexVector& psi0, const EnsembleConfig& config) {
  config.validate(model);
  if (psi0.size() != static_cast<Eigen::Index>(model.dim())) {
    throw DimensionError("run: initial state dimension does not match the model");
  }
  if (std::abs(psi0.squaredNorm() - 1.0) > 1e-8) {
    throw std::invalid_argument("run: initial state is not normalized");
  }
  const bool with_flux = has_energy_quanta(model);
  const std::size_t m = config.realizations;
  const std::size_t block_count = (m + config.block_size - 1) / config.block_size;
  std::vector<Block> blocks(block_count);

  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, block_count));

  std::atomic<std::size_t> next_block{0};
  std::mutex failure_mutex;
  std::size_t failed_index = std::numeric_limits<std::size_t>::max();
  std::string failure_message;
  std::atomic<std::size_t> failure_bound{std::numeric_limits<std::size_t>::max()};

  auto worker = [&]() {
    TrajectoryStepper stepper(model, config.scheme);
    for (;;) {
      const std::size_t b = next_block.fetch_add(1);
      if (b >= block_count) return;
      const std::size_t lo = b * config.block_size;
      const std::size_t hi = std::min(m, lo + config.block_size);
      // Blocks past a known failure cannot change the reported index.
      if (lo > failure_bound.load()) continue;
      Block block = empty_block(model, config, with_flux);
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          simulate_into(block, stepper, model, psi0, config, i, nullptr);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (i < failed_index) {
            failed_index = i;
            failure_message = e.what();
            failure_bound.store(i);
          }
          break;
        }
      }
      blocks[b] = std::move(block);
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (failed_index != std::numeric_limits<std::size_t>::max()) {
    throw TrajectoryAbort(fmt::format("trajectory {} failed: {} (replay with seed {}, index {})", failed_index,
                                      failure_message, config.master_seed, failed_index),
                          failed_index, config.master_seed);
  }

  Block total = reduce(blocks, 0, block_count);

  EnsembleEstimate est;
  est.grid = config.grid;
  est.realizations = m;
  est.master_seed = config.master_seed;
  est.rho_plus = std::move(total.rho_plus);
  est.rho_minus = std::move(total.rho_minus);
  for (std::size_t o = 0; o < config.observables.size(); ++o) {
    est.observable_names.push_back(config.observables[o].name);
    est.observables.push_back(finish(total.observables[o]));
  }
  est.mu = finish(total.mu);
  est.mu_abs = finish(total.mu_abs);
  for (const auto& pc : total.photocurrent) est.photocurrent.push_back(finish(pc));
  if (with_flux) est.energy_flux = finish(total.flux);
  est.jump_histogram = std::move(total.histogram);
  est.total_jumps = total.total_jumps;
  return est;
}

TrajectoryRecord replay(const TimeLocalModel& model, const ComplexVector& psi0, const EnsembleConfig& config,
                        std::size_t index) {
  config.validate(model);
  TrajectoryStepper stepper(model, config.scheme);
  Block scratch = empty_block(model, config, has_energy_quanta(model));
  TrajectoryRecord record;
  record.grid = config.grid;
  simulate_into(scratch, stepper, model, psi0, config, index, &record);
  return record;
}

double martingale_diagnostic(const EnsembleEstimate& estimate) {
  if (estimate.realizations < 100) {
    throw std::invalid_argument("martingale_diagnostic: needs at least 100 realizations");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < estimate.mu.size(); ++k) {
    const double dev = std::abs(estimate.mu.mean[k] - 1.0);
    const double se = estimate.mu.std_error[k];
    double ratio;
    if (se > 0.0) {
      ratio = dev / se;
    } else {
      ratio = dev <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    worst = std::max(worst, ratio);
  }
  return worst;
}

std::size_t band_violations(std::span<const double> reference, const MeanSeries& series) {
  if (reference.size() != series.size()) {
    throw DimensionError("band_violations: series lengths differ");
  }
  std::size_t outside = 0;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    const double dev = std::abs(series.mean[k] - reference[k]);
    // The roundoff slack only matters at zero-variance points such as t0.
    if (!(dev <= series.band(k) + 1e-12)) ++outside;
  }
  return outside;
}

double band_coverage(std::span<const double> reference, const MeanSeries& series) {
  if (reference.empty()) return 1.0;
  const auto outside = band_violations(reference, series);
  return 1.0 - static_cast<double>(outside) / static_cast<double>(reference.size());
}

std::vector<double> photocurrent_oracle(const TimeLocalModel& model, const DensitySeries& series,
                                        std::size_t channel) {
  if (channel >= model.channel_count()) {
    throw std::out_of_range("photocurrent_oracle: channel index");
  }
  std::vector<double> out;
  out.reserve(series.size());
  std::vector<double> weight(model.channel_count());
  std::vector<double> rate(model.channel_count());
  for (std::size_t k = 0; k < series.size(); ++k) {
    model.coefficients(series.times[k], weight, rate);
    const Complex tr = (model.number(channel) * series.states[k].matrix()).trace();
    out.push_back(weight[channel] * tr.real());
  }
  return out;
}

std::vector<double> bin_average(std::span<const double> times, std::span<const double> values,
                                std::span<const double> edges) {
  if (times.size() != values.size()) {
    throw DimensionError("bin_average: times and values differ in length");
  }
  std::vector<double> out;
  if (edges.size() < 2) return out;
  std::size_t i0 = find_time(times, edges[0]);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const std::size_t i1 = find_time(times, edges[k + 1]);
    double integral = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
      integral += 0.5 * (values[i] + values[i + 1]) * (times[i + 1] - times[i]);
    }
    out.push_back(integral / (times[i1] - times[i0]));
    i0 = i1;
  }
  return out;
}

PhotocurrentSeries photocurrent(const EnsembleEstimate& estimate, const TimeLocalModel& model,
                                std::size_t channel, const DensitySeries* oracle) {
  if (channel >= estimate.photocurrent.size() || channel >= model.channel_count()) {
    throw std::out_of_range("photocurrent: channel index");
  }
  PhotocurrentSeries s;
  const auto& grid = estimate.grid;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    s.bin_start.push_back(grid[k]);
    s.bin_end.push_back(grid[k + 1]);
  }
  s.mean = estimate.photocurrent[channel].mean;
  s.std_error = estimate.photocurrent[channel].std_error;
  if (oracle != nullptr) {
    const auto pointwise = photocurrent_oracle(model, *oracle, channel);
    s.oracle = bin_average(oracle->times, pointwise, grid);
  }
  return s;
}

void check_eigenoperators(const TimeLocalModel& model, double tol) {
  if (!model.bare_hamiltonian()) {
    throw std::invalid_argument("energy balance: the model has no bare Hamiltonian");
  }
  const ComplexMatrix& h0 = *model.bare_hamiltonian();
  for (std::size_t l = 0; l < model.channel_count(); ++l) {
    const auto& ch = model.channel(l);
    if (!ch.energy_quantum) {
      throw std::invalid_argument(fmt::format("energy balance: channel {} has no energy quantum", ch.name));
    }
    const ComplexMatrix op = to_dense(ch.op);
    const ComplexMatrix defect = h0 * op - op * h0 - *ch.energy_quantum * op;
    const double norm = defect.norm();
    if (norm > tol) {
      throw std::invalid_argument(
          fmt::format("energy balance: channel {} is not an eigenoperator of H0 (defect {:.3e})", ch.name, norm));
    }
  }
}

namespace {

// Tr([H0, H_t] rho) / i
double commutator_term(const ComplexMatrix& h0, const ComplexMatrix& h, const ComplexMatrix& rho) {
  const ComplexMatrix c = h0 * h - h * h0;
  return ((c * rho).trace() / kI).real();
}

}  // namespace

EnergyBalancePoint energy_balance_at(const TimeLocalModel& model, const HermitianMatrix& rho, double t) {
  check_eigenoperators(model);
  const ComplexMatrix& h0 = *model.bare_hamiltonian();
  EnergyBalancePoint p{};
  p.lhs = (h0 * lgks_rhs(model, rho, t)).trace().real();
  p.rhs = commutator_term(h0, model.hamiltonian_at(t), rho.matrix());
  std::vector<double> weight(model.channel_count());
  std::vector<double> rate(model.channel_count());
  model.coefficients(t, weight, rate);
  for (std::size_t l = 0; l < model.channel_count(); ++l) {
    const double occupancy = (model.number(l) * rho.matrix()).trace().real();
    p.rhs += *model.channel(l).energy_quantum * weight[l] * occupancy;
  }
  return p;
}

EnergyBalanceReport energy_balance_check(const TimeLocalModel& model, const DensitySeries& oracle,
                                         const EnsembleEstimate& estimate) {
  check_eigenoperators(model);
  if (!estimate.energy_flux) {
    throw std::invalid_argument("energy balance: the estimate carries no energy flux");
  }
  const ComplexMatrix& h0 = *model.bare_hamiltonian();
  std::vector<double> energy;
  std::vector<double> commutator;
  energy.reserve(oracle.size());
  commutator.reserve(oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    const ComplexMatrix& rho = oracle.states[i].matrix();
    energy.push_back((h0 * rho).trace().real());
    commutator.push_back(commutator_term(h0, model.hamiltonian_at(oracle.times[i]), rho));
  }
  const auto& grid = estimate.grid;
  const auto comm_bins = bin_average(oracle.times, commutator, grid);
  EnergyBalanceReport report;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    EnergyBalanceBin bin{};
    bin.t0 = grid[k];
    bin.t1 = grid[k + 1];
    const std::size_t i0 = find_time(oracle.times, bin.t0);
    const std::size_t i1 = find_time(oracle.times, bin.t1);
    bin.lhs = (energy[i1] - energy[i0]) / (bin.t1 - bin.t0);
    bin.commutator = comm_bins[k];
    bin.flux = estimate.energy_flux->mean[k];
    bin.flux_std_error = estimate.energy_flux->std_error[k];
    bin.residual = bin.lhs - bin.commutator - bin.flux;
    const double abs_res = std::abs(bin.residual);
    report.max_abs_residual = std::max(report.max_abs_residual, abs_res);
    double ratio;
    if (bin.flux_std_error > 0.0) {
      ratio = abs_res / bin.flux_std_error;
    } else {
      ratio = abs_res <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    report.max_ratio = std::max(report.max_ratio, ratio);
    report.bins.push_back(bin);
  }
  return report;
}

WpSplit wp_split_average(const EnsembleEstimate& estimate) {
  if (!estimate.has_density()) {
    throw std::invalid_argument("wp_split_average: density accumulation was not requested");
  }
  return {estimate.rho_plus, estimate.rho_minus};
}

}  // namespace qtraj
