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

#include "qtraj/models.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace qtraj::models {

namespace {

using qubit::sigma_minus;
using qubit::sigma_plus;

SparseOperator number_operator() { return sigma_plus() * sigma_minus(); }

// First nonzero entry of each column made real and positive, so that
// eigenvector phases do not depend on the eigensolver.
void fix_column_phases(ComplexMatrix& u) {
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const double a = std::abs(u(i, j));
      if (a > 1e-12) {
        u.col(j) *= std::conj(u(i, j)) / a;
        break;
      }
    }
  }
}

}  // namespace

TimeLocalModel build_decay(TimeScalar gamma, RatePolicy policy) {
  std::vector<Channel> channels;
  channels.push_back({"decay", sigma_minus(), std::move(gamma), std::move(policy), std::nullopt});
  return TimeLocalModel(2, Hamiltonian(), std::move(channels), std::nullopt,
                        std::numeric_limits<double>::infinity(), "decay");
}

TimeLocalModel build_two_channel_qubit(TimeScalar gamma_minus, TimeScalar gamma_plus, double omega,
                                       TimeScalar drive) {
  if (!std::isfinite(omega)) {
    throw std::invalid_argument("build_two_channel_qubit: omega is not finite");
  }
  const SparseOperator h0 = omega * number_operator();
  Hamiltonian h(h0);
  h.add_term(std::move(drive), qubit::sigma_x());
  std::vector<Channel> channels;
  channels.push_back({"emission", sigma_minus(), std::move(gamma_minus), rate::AbsValue{}, -omega});
  channels.push_back({"absorption", sigma_plus(), std::move(gamma_plus), rate::AbsValue{}, omega});
  return TimeLocalModel(2, std::move(h), std::move(channels), to_dense(h0),
                        std::numeric_limits<double>::infinity(), "two_channel_qubit");
}

TimeLocalModel build_pbg(TimeScalar lamb_shift, TimeScalar gamma) {
  std::optional<double> half_bound;
  if (lamb_shift.declared_bound()) half_bound = 0.5 * *lamb_shift.declared_bound();
  TimeScalar half = TimeScalar::function([s = lamb_shift](double t) { return 0.5 * s(t); }, half_bound,
                                         "S(t)/2");
  Hamiltonian h;
  h.add_term(std::move(half), number_operator());
  std::vector<Channel> channels;
  channels.push_back({"emission", sigma_minus(), std::move(gamma), rate::AbsValue{}, std::nullopt});
  return TimeLocalModel(2, std::move(h), std::move(channels), std::nullopt,
                        std::numeric_limits<double>::infinity(), "pbg");
}

PbgCoefficients pbg_coefficients(std::complex<double> c, std::complex<double> c_dot) {
  if (std::abs(c) == 0.0) {
    throw std::invalid_argument("pbg_coefficients: coherence vanishes");
  }
  const std::complex<double> g = c_dot / c;
  return {-2.0 * g.imag(), -2.0 * g.real()};
}

std::complex<double> pbg_demo_coherence(double t) {
  const double envelope = (0.6 + 0.4 * std::cos(3.0 * t)) * std::exp(-0.3 * t);
  return envelope * std::exp(std::complex<double>(0.0, -0.5 * t));
}

std::complex<double> pbg_demo_coherence_derivative(double t) {
  const double a = 0.6 + 0.4 * std::cos(3.0 * t);
  const double log_rate = -1.2 * std::sin(3.0 * t) / a - 0.3;
  return std::complex<double>(log_rate, -0.5) * pbg_demo_coherence(t);
}

PbgTable pbg_demo_table(double t0, double t1, std::size_t samples) {
  if (samples < 2 || !(t1 > t0)) {
    throw std::invalid_argument("pbg_demo_table: need t1 > t0 and at least two samples");
  }
  PbgTable table;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(samples - 1);
    const auto coeff = pbg_coefficients(pbg_demo_coherence(t), pbg_demo_coherence_derivative(t));
    table.times.push_back(t);
    table.lamb_shift.push_back(coeff.lamb_shift);
    table.gamma.push_back(coeff.gamma);
  }
  return table;
}

TimeLocalModel build_controllable(const ControllableParams& p) {
  const std::array<SparseOperator, 3> ops{qubit::sigma_x(), qubit::sigma_y(), qubit::sigma_z()};
  std::vector<Channel> channels;
  for (std::size_t l = 0; l < 3; ++l) {
    const double a = p.a[l];
    const double b = p.b[l];
    const double c = p.c[l];
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
      throw std::invalid_argument("build_controllable: parameters must be finite");
    }
    TimeScalar weight = TimeScalar::function([a, b, c](double t) { return -a + b * std::tanh(c * t); },
                                             std::abs(a) + std::abs(b),
                                             fmt::format("-{} + {} tanh({} t)", a, b, c));
    channels.push_back({fmt::format("sigma{}", l + 1), ops[l], std::move(weight), rate::AbsValue{}, std::nullopt});
  }
  return TimeLocalModel(2, Hamiltonian(), std::move(channels), std::nullopt,
                        std::numeric_limits<double>::infinity(), "controllable");
}

ComplexVector controllable_initial_state() {
  return (std::sqrt(3.0) / 2.0) * qubit::excited() + 0.5 * qubit::ground();
}

RedfieldMatrices redfield_matrices(const RedfieldParams& p) {
  if (!(p.gamma1 > 0.0) || !(p.gamma2 > 0.0)) {
    throw std::invalid_argument("redfield: gamma1 and gamma2 must be positive");
  }
  if (!std::isfinite(p.alpha) || !std::isfinite(p.kappa) || !std::isfinite(p.gamma1) || !std::isfinite(p.gamma2)) {
    throw std::invalid_argument("redfield: parameters must be finite");
  }
  const Complex i = kI;
  RedfieldMatrices m;
  m.a.resize(2, 2);
  m.a(0, 0) = p.alpha;
  m.a(0, 1) = p.alpha + p.kappa / 2.0 - i * (p.gamma2 - p.gamma1) / 4.0;
  m.a(1, 0) = p.alpha + p.kappa / 2.0 - i * (p.gamma1 - p.gamma2) / 4.0;
  m.a(1, 1) = p.alpha + p.kappa;
  m.b.resize(2, 2);
  const double mean = (p.gamma1 + p.gamma2) / 2.0;
  m.b(0, 0) = p.gamma1;
  m.b(0, 1) = mean - i * p.kappa;
  m.b(1, 0) = mean + i * p.kappa;
  m.b(1, 1) = p.gamma2;
  m.b *= 0.5;
  const auto eig = hermitian_eigen(m.b);
  if (std::abs(eig.values[1] - eig.values[0]) <= 1e-12 * std::max(1.0, std::abs(eig.values[1]))) {
    throw std::invalid_argument("redfield: degenerate dissipation matrix");
  }
  m.u = eig.vectors;
  fix_column_phases(m.u);
  m.lambda = {eig.values[0], eig.values[1]};
  return m;
}

TimeLocalModel build_redfield(const RedfieldParams& p) {
  const auto m = redfield_matrices(p);
  const std::array<SparseOperator, 2> lower{embed_site(sigma_minus(), 0, 2), embed_site(sigma_minus(), 1, 2)};
  const std::array<SparseOperator, 2> raise{embed_site(sigma_plus(), 0, 2), embed_site(sigma_plus(), 1, 2)};
  SparseOperator h(4, 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      h += SparseOperator(m.a(i, j) * SparseOperator(raise[j] * lower[i]));
    }
  }
  h.prune(Complex(0.0));
  std::vector<Channel> channels;
  for (int j = 0; j < 2; ++j) {
    SparseOperator l = SparseOperator(m.u(0, j) * lower[0]) + SparseOperator(m.u(1, j) * lower[1]);
    l.prune(Complex(0.0));
    channels.push_back({fmt::format("L{}", j + 1), l, TimeScalar::constant(m.lambda[j]), rate::AbsValue{},
                        std::nullopt});
  }
  return TimeLocalModel(4, Hamiltonian(h), std::move(channels), std::nullopt,
                        std::numeric_limits<double>::infinity(), "redfield");
}

ComplexVector redfield_initial_state(const TimeLocalModel& redfield) {
  if (redfield.dim() != 4 || redfield.channel_count() != 2) {
    throw DimensionError("redfield_initial_state: expects the two-qubit Redfield model");
  }
  const ComplexVector g = product_state({qubit::ground(), qubit::ground()});
  const ComplexVector w1 = redfield.jump_adjoint(0) * g;
  const ComplexVector w2 = redfield.jump_adjoint(1) * g;
  return std::sqrt(0.2) * w1 + std::sqrt(0.1) * w2 + std::sqrt(0.7) * g;
}

TimeScalar chain_default_modulation(double gamma) {
  return TimeScalar::function(
      [gamma](double t) {
        const double s = std::sin(15.0 * t);
        return gamma - 12.0 * std::exp(-2.0 * t * t * t) * s * s;
      },
      std::abs(gamma) + 12.0, fmt::format("{} - 12 exp(-2 t^3) sin^2(15 t)", gamma));
}

double chain_split(double gamma1, double delta) {
  if (gamma1 >= 0.0) {
    return 0.0;
  }
  // With b = (|g| + delta/2) / (|g| + delta), c = -b r_partner and
  // r_partner = delta - c. Solved in closed form so delta = 0 stays finite.
  return -(2.0 * std::abs(gamma1) + delta);
}

TimeLocalModel build_chain(const ChainParams& p) {
  if (p.n < 2) {
    throw std::invalid_argument("build_chain: needs at least two sites");
  }
  if (p.n > 24) {
    throw std::invalid_argument("build_chain: more than 24 sites");
  }
  if (!std::isfinite(p.lambda) || !std::isfinite(p.gamma) || !std::isfinite(p.delta)) {
    throw std::invalid_argument("build_chain: parameters must be finite");
  }
  if (p.gamma < 0.0 || p.delta < 0.0) {
    throw std::invalid_argument("build_chain: gamma and delta must be non-negative");
  }
  const std::size_t n = p.n;
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  std::vector<SparseOperator> lower;
  std::vector<SparseOperator> raise;
  for (std::size_t l = 0; l < n; ++l) {
    lower.push_back(embed_site(sigma_minus(), l, n));
    raise.push_back(embed_site(sigma_plus(), l, n));
  }
  SparseOperator h(dim, dim);
  for (std::size_t l = 0; l < n; ++l) {
    h += SparseOperator(raise[l] * lower[l]);
  }
  if (p.lambda != 0.0) {
    for (std::size_t l = 0; l + 1 < n; ++l) {
      h += SparseOperator(p.lambda * SparseOperator(raise[l] * lower[l + 1]));
      h += SparseOperator(p.lambda * SparseOperator(raise[l + 1] * lower[l]));
    }
  }
  h.prune(Complex(0.0));

  const double delta = p.delta;
  std::vector<Channel> channels;
  TimeScalar gamma1 = p.gamma1 ? *p.gamma1 : chain_default_modulation(p.gamma);
  channels.push_back({"minus1", lower[0], std::move(gamma1),
                      rate::Shifted{n, [delta](double, double gs, double) { return chain_split(gs, delta); }},
                      std::nullopt});
  for (std::size_t l = 1; l < n; ++l) {
    channels.push_back(
        {fmt::format("minus{}", l + 1), lower[l], TimeScalar::constant(p.gamma), rate::AbsValue{}, std::nullopt});
  }
  for (std::size_t l = 0; l < n; ++l) {
    channels.push_back(
        {fmt::format("plus{}", l + 1), raise[l], TimeScalar::constant(delta), rate::AbsValue{}, std::nullopt});
  }
  return TimeLocalModel(static_cast<std::size_t>(dim), Hamiltonian(h), std::move(channels), std::nullopt,
                        std::numeric_limits<double>::infinity(), fmt::format("chain{}", n));
}

ComplexVector chain_initial_state(std::size_t n) {
  const ComplexVector site = (qubit::excited() + qubit::ground()) / std::sqrt(2.0);
  return product_state(std::vector<ComplexVector>(n, site));
}

ComplexVector product_state(const std::vector<ComplexVector>& sites) {
  ComplexVector out = ComplexVector::Ones(1);
  for (const auto& s : sites) {
    ComplexVector next(out.size() * s.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      next.segment(i * s.size(), s.size()) = out(i) * s;
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace qtraj::models
