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
#include <string>
#include <vector>

#include "qtraj/linalg.hpp"
#include "qtraj/master_eq.hpp"
#include "qtraj/model.hpp"
#include "qtraj/trajectory.hpp"

namespace qtraj {

struct Observable {
  std::string name;
  SparseOperator op;
};

/// Checks Hermiticity before storing.
Observable make_observable(std::string name, const ComplexMatrix& op);
/// |v><v| for a unit vector v.
Observable projector_observable(std::string name, const ComplexVector& v);
/// |i><i| in a dim-dimensional space.
Observable basis_projector(std::string name, std::size_t index, std::size_t dim);
/// sigma_plus sigma_minus on one site of a qubit register.
Observable site_population(std::string name, std::size_t site, std::size_t num_sites);

struct EnsembleConfig {
  std::size_t realizations = 1000;
  std::uint64_t master_seed = 0;
  SchemeConfig scheme;
  /// Record times; the first is the initial time.
  std::vector<double> grid;
  std::vector<Observable> observables;
  /// Accumulate the weighted density matrices (d^2 per grid time).
  bool accumulate_density = true;
  /// 0 uses std::thread::hardware_concurrency().
  unsigned threads = 1;
  /// Trajectories per reduction block. Part of the reproducibility contract:
  /// changing it changes the rounding of the result.
  std::size_t block_size = 64;

  void validate(const TimeLocalModel& model) const;
};

/// Per grid time: sample mean, standard error of the mean and sample standard
/// deviation of a per-trajectory quantity.
struct MeanSeries {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::vector<double> std_dev;

  std::size_t size() const { return mean.size(); }
  /// Acceptance band half-width, 2 * std_error.
  double band(std::size_t k) const { return 2.0 * std_error[k]; }
};

struct EnsembleEstimate {
  std::vector<double> grid;
  std::size_t realizations = 0;
  std::uint64_t master_seed = 0;

  /// Means of mu+ psi psi^dagger and mu- psi psi^dagger, mu+- = max(0, +-mu).
  /// Empty unless density accumulation was requested.
  std::vector<ComplexMatrix> rho_plus;
  std::vector<ComplexMatrix> rho_minus;

  std::vector<std::string> observable_names;
  /// mu <psi|O|psi> per observable.
  std::vector<MeanSeries> observables;
  MeanSeries mu;
  MeanSeries mu_abs;

  /// Per channel, per grid interval k = [t_k, t_{k+1}]: the sum of mu over
  /// the channel's jumps inside the interval, divided by its width.
  std::vector<MeanSeries> photocurrent;
  /// Per grid interval: sum_l eps_l times the photocurrent sample. Present
  /// when every channel has an energy quantum.
  std::optional<MeanSeries> energy_flux;

  /// histogram[n] counts trajectories with n jumps; the last bin collects
  /// everything above.
  std::vector<std::uint64_t> jump_histogram;
  std::uint64_t total_jumps = 0;

  bool has_density() const { return !rho_plus.empty(); }
  ComplexMatrix rho_hat(std::size_t k) const { return rho_plus[k] - rho_minus[k]; }
  std::size_t observable_index(const std::string& name) const;
};

/// Runs config.realizations independent trajectories from psi0 and averages.
/// Trajectory i draws from RandomStream(master_seed, i); the reduction order
/// is fixed, so the result does not depend on the thread count. On failure
/// throws TrajectoryAbort naming the lowest failing trajectory index.
EnsembleEstimate run(const TimeLocalModel& model, const ComplexVector& psi0, const EnsembleConfig& config);

/// One trajectory of an ensemble, recorded on the grid.
struct TrajectoryRecord {
  std::vector<double> grid;
  std::vector<ComplexVector> psi;
  std::vector<double> mu;
  std::vector<JumpRecord> jumps;
};

/// Replays trajectory `index` of the ensemble described by `config`.
TrajectoryRecord replay(const TimeLocalModel& model, const ComplexVector& psi0, const EnsembleConfig& config,
                        std::size_t index);

/// max_k |mean_mu(t_k) - 1| / stderr_mu(t_k). Points with zero spread count
/// as 0 if the mean is 1 to roundoff and as +inf otherwise. Requires M >= 100.
double martingale_diagnostic(const EnsembleEstimate& estimate);

/// Fraction of grid points with |mean - reference| <= 2 * stderr.
double band_coverage(std::span<const double> reference, const MeanSeries& series);
/// Number of grid points outside the band.
std::size_t band_violations(std::span<const double> reference, const MeanSeries& series);

/// Gamma_{l,t} Tr(L rho_t L^dagger) at the series times.
std::vector<double> photocurrent_oracle(const TimeLocalModel& model, const DensitySeries& series,
                                        std::size_t channel);

struct PhotocurrentSeries {
  std::vector<double> bin_start;
  std::vector<double> bin_end;
  std::vector<double> mean;
  std::vector<double> std_error;
  /// Oracle value averaged over each bin (trapezoid over the oracle times
  /// inside it). Empty if no oracle was supplied.
  std::vector<double> oracle;
};

/// Empirical photocurrent of `channel`, paired with the oracle when given.
/// Every bin edge must be one of the oracle's times.
PhotocurrentSeries photocurrent(const EnsembleEstimate& estimate, const TimeLocalModel& model,
                                std::size_t channel, const DensitySeries* oracle = nullptr);

/// Trapezoid average of values(times) over each [edges_k, edges_{k+1}].
std::vector<double> bin_average(std::span<const double> times, std::span<const double> values,
                                std::span<const double> edges);

/// Both sides of the energy balance at one instant, from the oracle alone:
/// lhs = Tr(H0 drho/dt), rhs = Tr([H0, H_t] rho)/i + sum_l eps_l Gamma_l Tr(L rho L^dagger).
struct EnergyBalancePoint {
  double lhs;
  double rhs;
};
EnergyBalancePoint energy_balance_at(const TimeLocalModel& model, const HermitianMatrix& rho, double t);

struct EnergyBalanceBin {
  double t0;
  double t1;
  /// (Tr H0 rho(t1) - Tr H0 rho(t0)) / (t1 - t0)
  double lhs;
  /// Bin average of Tr([H0, H_t] rho)/i.
  double commutator;
  /// Empirical sum_l eps_l photocurrent_l and its standard error.
  double flux;
  double flux_std_error;
  double residual;
};

struct EnergyBalanceReport {
  std::vector<EnergyBalanceBin> bins;
  double max_abs_residual = 0.0;
  /// max |residual| / flux_std_error; bins with zero error count as 0 when the
  /// residual is below 1e-12.
  double max_ratio = 0.0;
};

/// Checks the eigenoperator condition ||[H0, L] - eps L|| <= 1e-10 (throws
/// std::invalid_argument otherwise, or when H0 or an eps is missing), then
/// compares the oracle energy change per bin with the commutator term plus the
/// empirical energy flux. Every bin edge must be one of the oracle's times.
EnergyBalanceReport energy_balance_check(const TimeLocalModel& model, const DensitySeries& oracle,
                                         const EnsembleEstimate& estimate);

/// Throws std::invalid_argument if some channel violates [H0, L] = eps L.
void check_eigenoperators(const TimeLocalModel& model, double tol = 1e-10);

struct WpSplit {
  std::vector<ComplexMatrix> rho_plus;
  std::vector<ComplexMatrix> rho_minus;
};
/// The two positive parts of the weighted ensemble. rho_plus - rho_minus is
/// rho_hat bit for bit.
WpSplit wp_split_average(const EnsembleEstimate& estimate);

}  // namespace qtraj
