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
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qtraj/linalg.hpp"
#include "qtraj/time_scalar.hpp"

namespace qtraj {

/// H_t = sum_k f_k(t) H_k with real coefficients f_k.
class Hamiltonian {
 public:
  struct Term {
    TimeScalar coefficient;
    SparseOperator op;
  };

  Hamiltonian() = default;
  explicit Hamiltonian(SparseOperator constant);

  Hamiltonian& add_term(TimeScalar coefficient, SparseOperator op);

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  ComplexMatrix at(double t, Eigen::Index dim) const;
  /// out = H_t v
  void apply(double t, const ComplexVector& v, ComplexVector& out) const;
  /// H_t m
  ComplexMatrix apply(double t, const ComplexMatrix& m) const;

 private:
  std::vector<Term> terms_;
};

namespace rate {

/// r = |Gamma|. A channel with Gamma = 0 at time t is dormant at t.
struct AbsValue {};

struct Constant {
  double value;
};

struct Custom {
  TimeScalar rate;
};

/// c(t, Gamma_self, Gamma_partner) <= 0. The pair of rates is
/// r_self = Gamma_self - c and r_partner = Gamma_partner - c.
using SplitFunction = std::function<double(double t, double gamma_self, double gamma_partner)>;

/// Shares a negative shift c between this channel and `partner`. The
/// partner's own policy is ignored: its rate is set by the split.
struct Shifted {
  std::size_t partner;
  SplitFunction split;
};

}  // namespace rate

using RatePolicy = std::variant<rate::AbsValue, rate::Constant, rate::Shifted, rate::Custom>;

struct Channel {
  std::string name;
  SparseOperator op;
  TimeScalar weight;
  RatePolicy rate = rate::AbsValue{};
  /// Energy exchanged with the environment per jump, [H0, L] = eps L.
  std::optional<double> energy_quantum;
};

/// Weights Gamma_{l,t} and jump rates r_{l,t} of every channel at one instant.
struct ChannelCoefficients {
  std::vector<double> weight;
  std::vector<double> rate;
};

/// drho/dt = -i[H_t, rho] + sum_l Gamma_{l,t} (L rho L^dagger - {L^dagger L, rho}/2)
///
/// Immutable after construction. Sparse forms of L, L^dagger and L^dagger L
/// are computed once and shared by every integrator.
class TimeLocalModel {
 public:
  TimeLocalModel(std::size_t dim, Hamiltonian hamiltonian, std::vector<Channel> channels,
                 std::optional<ComplexMatrix> bare_hamiltonian = std::nullopt,
                 double horizon = std::numeric_limits<double>::infinity(),
                 std::string name = {});

  std::size_t dim() const { return dim_; }
  std::size_t channel_count() const { return channels_.size(); }
  const std::vector<Channel>& channels() const { return channels_; }
  const Channel& channel(std::size_t l) const { return channels_.at(l); }
  const Hamiltonian& hamiltonian() const { return hamiltonian_; }
  const std::optional<ComplexMatrix>& bare_hamiltonian() const { return bare_hamiltonian_; }
  double horizon() const { return horizon_; }
  const std::string& name() const { return name_; }

  const SparseOperator& jump(std::size_t l) const { return jumps_[l]; }
  const SparseOperator& jump_adjoint(std::size_t l) const { return adjoints_[l]; }
  /// L^dagger L
  const SparseOperator& number(std::size_t l) const { return numbers_[l]; }

  /// Throws NonFiniteError when a weight is not finite at t.
  void coefficients(double t, std::span<double> weight, std::span<double> rate) const;
  ChannelCoefficients coefficients(double t) const;

  ComplexMatrix hamiltonian_at(double t) const { return hamiltonian_.at(t, static_cast<Eigen::Index>(dim_)); }

  /// Copy with a different horizon.
  TimeLocalModel with_horizon(double horizon) const;

 private:
  std::size_t dim_;
  Hamiltonian hamiltonian_;
  std::vector<Channel> channels_;
  std::optional<ComplexMatrix> bare_hamiltonian_;
  double horizon_;
  std::string name_;
  std::vector<SparseOperator> jumps_;
  std::vector<SparseOperator> adjoints_;
  std::vector<SparseOperator> numbers_;
};

/// Right-hand side of the master equation. The result is symmetrized, so it is
/// exactly Hermitian whenever rho is.
ComplexMatrix lgks_rhs(const TimeLocalModel& model, const ComplexMatrix& rho, double t);
ComplexMatrix lgks_rhs(const TimeLocalModel& model, const HermitianMatrix& rho, double t);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

struct ValidationOptions {
  /// Sampled interval is [0, horizon]; `fallback_horizon` is used when the
  /// model's horizon is infinite.
  double fallback_horizon = 1.0;
  int samples = 201;
  double hermitian_tolerance = 1e-10;
};

/// Report-only model check: Hermiticity of H_t on a time grid, finiteness and
/// declared bounds of the weights, positivity of the jump rates wherever a
/// channel is active, and the bare Hamiltonian's Hermiticity.
ValidationReport validate(const TimeLocalModel& model, const ValidationOptions& options = {});

}  // namespace qtraj
