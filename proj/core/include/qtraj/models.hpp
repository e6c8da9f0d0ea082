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

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "qtraj/linalg.hpp"
#include "qtraj/model.hpp"
#include "qtraj/time_scalar.hpp"

namespace qtraj::models {

/// Spontaneous decay of a qubit: H = 0, L = sigma_minus with weight gamma.
TimeLocalModel build_decay(TimeScalar gamma = TimeScalar::constant(1.0), RatePolicy policy = rate::AbsValue{});

/// Qubit with bare Hamiltonian H0 = omega sigma_+ sigma_-, channels sigma_-
/// (energy quantum -omega) and sigma_+ (+omega), and H_t = H0 + drive(t) sigma_1.
TimeLocalModel build_two_channel_qubit(TimeScalar gamma_minus, TimeScalar gamma_plus, double omega = 1.0,
                                       TimeScalar drive = TimeScalar());

/// Two-level atom in a photonic band gap: H_t = (S_t / 2) sigma_+ sigma_-,
/// L = sigma_minus with weight Gamma_t, rate |Gamma_t|.
TimeLocalModel build_pbg(TimeScalar lamb_shift, TimeScalar gamma);

/// Lamb shift and weight that make <e|rho_t|g> / <e|rho_0|g> equal to c_t:
/// S = -2 Im(c'/c), Gamma = -2 Re(c'/c).
struct PbgCoefficients {
  double lamb_shift;
  double gamma;
};
PbgCoefficients pbg_coefficients(std::complex<double> c, std::complex<double> c_dot);

/// Demo coherence c_t = (0.6 + 0.4 cos 3t) exp(-0.3 t) exp(-0.5 i t) and its
/// derivative. Its weight dips below zero around t = 1.3.
std::complex<double> pbg_demo_coherence(double t);
std::complex<double> pbg_demo_coherence_derivative(double t);

/// Tabulated (S_t, Gamma_t) of the demo coherence on `samples` equally spaced
/// points of [t0, t1].
struct PbgTable {
  std::vector<double> times;
  std::vector<double> lamb_shift;
  std::vector<double> gamma;
};
PbgTable pbg_demo_table(double t0, double t1, std::size_t samples);

/// Gamma_l(t) = -a_l + b_l tanh(c_l t) on L_l = sigma_l, H = 0.
struct ControllableParams {
  std::array<double, 3> a{0.5, 1.0, 0.8};
  std::array<double, 3> b{2.0, 2.0, 2.0};
  std::array<double, 3> c{1.4142135623730951, 1.7320508075688772, 2.23606797749979};
};
TimeLocalModel build_controllable(const ControllableParams& p = {});
/// (sqrt(3)/2) e + (1/2) g
ComplexVector controllable_initial_state();

struct RedfieldParams {
  double gamma1 = 1.0;
  double gamma2 = 4.0;
  double alpha = 3.0;
  double kappa = 1.0;
};

struct RedfieldMatrices {
  ComplexMatrix a;
  ComplexMatrix b;
  /// Columns are eigenvectors of b, U^dagger B U = diag(lambda).
  ComplexMatrix u;
  /// Ascending; lambda[0] < 0.
  std::array<double, 2> lambda;
};
RedfieldMatrices redfield_matrices(const RedfieldParams& p);

/// Two qubits (site 0 is the leftmost tensor factor) with
/// H = sum_ij A_ij sigma_+^(j) sigma_-^(i) and L_j = sum_i sigma_-^(i) U_ij,
/// constant weights lambda_j.
TimeLocalModel build_redfield(const RedfieldParams& p = {});
/// sqrt(0.2) w1 + sqrt(0.1) w2 + sqrt(0.7) g, with w_j = L_j^dagger g.
ComplexVector redfield_initial_state(const TimeLocalModel& redfield);

/// gamma - 12 exp(-2 t^3) sin^2(15 t)
TimeScalar chain_default_modulation(double gamma);

struct ChainParams {
  std::size_t n = 4;
  double lambda = 10.0;
  double gamma = (1.0 / 0.129) * (1.0 + 0.063);
  double delta = 0.063 / 0.129;
  /// Weight of sigma_-^(1); defaults to chain_default_modulation(gamma).
  std::optional<TimeScalar> gamma1;
};

/// N coupled qubits: H = sum sigma_+ sigma_- + lambda sum (sigma_+^l sigma_-^{l+1} + h.c.),
/// channels sigma_-^(l) (l = 0..N-1) then sigma_+^(l). Channels 0 and N share
/// a shifted rate: while Gamma_1 < 0 the rates are |Gamma_1| + delta and
/// 2 (|Gamma_1| + delta), otherwise they equal the weights.
TimeLocalModel build_chain(const ChainParams& p);
/// The split c_t used by build_chain.
double chain_split(double gamma1, double delta);
/// ((e + g) / sqrt 2) on every site.
ComplexVector chain_initial_state(std::size_t n);

/// Tensor product of single-qubit states, site 0 leftmost.
ComplexVector product_state(const std::vector<ComplexVector>& sites);

}  // namespace qtraj::models
