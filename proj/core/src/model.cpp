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

#include "qtraj/model.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>

namespace qtraj {

Hamiltonian::Hamiltonian(SparseOperator constant) {
  terms_.push_back({TimeScalar::constant(1.0), std::move(constant)});
}

Hamiltonian& Hamiltonian::add_term(TimeScalar coefficient, SparseOperator op) {
  if (op.rows() != op.cols()) {
    throw DimensionError("Hamiltonian::add_term: operator is not square");
  }
  if (!terms_.empty() && op.rows() != terms_.front().op.rows()) {
    throw DimensionError("Hamiltonian::add_term: inconsistent dimensions");
  }
  terms_.push_back({std::move(coefficient), std::move(op)});
  return *this;
}

ComplexMatrix Hamiltonian::at(double t, Eigen::Index dim) const {
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (const auto& term : terms_) {
    h += term.coefficient(t) * to_dense(term.op);
  }
  return h;
}

void Hamiltonian::apply(double t, const ComplexVector& v, ComplexVector& out) const {
  out.setZero(v.size());
  for (const auto& term : terms_) {
    const double c = term.coefficient(t);
    if (c != 0.0) {
      out.noalias() += c * (term.op * v);
    }
  }
}

ComplexMatrix Hamiltonian::apply(double t, const ComplexMatrix& m) const {
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  for (const auto& term : terms_) {
    const double c = term.coefficient(t);
    if (c != 0.0) {
      out.noalias() += c * (term.op * m);
    }
  }
  return out;
}

TimeLocalModel::TimeLocalModel(std::size_t dim, Hamiltonian hamiltonian,
                               std::vector<Channel> channels,
                               std::optional<ComplexMatrix> bare_hamiltonian, double horizon,
                               std::string name)
    : dim_(dim),
      hamiltonian_(std::move(hamiltonian)),
      channels_(std::move(channels)),
      bare_hamiltonian_(std::move(bare_hamiltonian)),
      horizon_(horizon),
      name_(std::move(name)) {
  if (dim_ == 0) {
    throw DimensionError("TimeLocalModel: dimension must be positive");
  }
  const auto d = static_cast<Eigen::Index>(dim_);
  for (const auto& term : hamiltonian_.terms()) {
    if (term.op.rows() != d || term.op.cols() != d) {
      throw DimensionError(fmt::format("TimeLocalModel: Hamiltonian term is {}x{}, expected {}x{}",
                                       term.op.rows(), term.op.cols(), d, d));
    }
  }
  if (bare_hamiltonian_ && (bare_hamiltonian_->rows() != d || bare_hamiltonian_->cols() != d)) {
    throw DimensionError("TimeLocalModel: bare Hamiltonian has wrong dimension");
  }
  if (!(horizon_ > 0.0)) {
    throw std::invalid_argument("TimeLocalModel: horizon must be positive");
  }
  jumps_.reserve(channels_.size());
  for (std::size_t l = 0; l < channels_.size(); ++l) {
    auto& ch = channels_[l];
    if (ch.name.empty()) {
      ch.name = fmt::format("L{}", l + 1);
    }
    if (ch.op.rows() != d || ch.op.cols() != d) {
      throw DimensionError(fmt::format("TimeLocalModel: channel {} operator is {}x{}, expected {}x{}",
                                       ch.name, ch.op.rows(), ch.op.cols(), d, d));
    }
    ch.op.prune(Complex(0.0, 0.0));
    if (ch.op.nonZeros() == 0) {
      throw std::invalid_argument(fmt::format("TimeLocalModel: channel {} operator is zero", ch.name));
    }
    if (const auto* s = std::get_if<rate::Shifted>(&ch.rate)) {
      if (s->partner >= channels_.size() || s->partner == l) {
        throw std::invalid_argument(
            fmt::format("TimeLocalModel: channel {} has invalid shift partner {}", ch.name, s->partner));
      }
      if (!s->split) {
        throw std::invalid_argument("TimeLocalModel: shifted rate policy without split function");
      }
    }
    jumps_.push_back(ch.op);
    SparseOperator adj = ch.op.adjoint();
    adjoints_.push_back(adj);
    SparseOperator n = adj * ch.op;
    n.prune(Complex(0.0, 0.0));
    numbers_.push_back(std::move(n));
  }
}

void TimeLocalModel::coefficients(double t, std::span<double> weight, std::span<double> rate) const {
  const std::size_t n = channels_.size();
  if (weight.size() < n || rate.size() < n) {
    throw DimensionError("TimeLocalModel::coefficients: output spans too short");
  }
  for (std::size_t l = 0; l < n; ++l) {
    const double w = channels_[l].weight(t);
    if (!std::isfinite(w)) {
      throw NonFiniteError(fmt::format("weight of channel {} is not finite at t={}", channels_[l].name, t), t);
    }
    weight[l] = w;
  }
  for (std::size_t l = 0; l < n; ++l) {
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, rate::AbsValue>) {
            rate[l] = std::abs(weight[l]);
          } else if constexpr (std::is_same_v<P, rate::Constant>) {
            rate[l] = p.value;
          } else if constexpr (std::is_same_v<P, rate::Custom>) {
            rate[l] = p.rate(t);
          } else {
            rate[l] = std::abs(weight[l]);
          }
        },
        channels_[l].rate);
  }
  // Shifted pairs override both members after the individual policies.
  for (std::size_t l = 0; l < n; ++l) {
    if (const auto* s = std::get_if<rate::Shifted>(&channels_[l].rate)) {
      const double c = s->split(t, weight[l], weight[s->partner]);
      rate[l] = weight[l] - c;
      rate[s->partner] = weight[s->partner] - c;
    }
  }
}

ChannelCoefficients TimeLocalModel::coefficients(double t) const {
  ChannelCoefficients c;
  c.weight.resize(channels_.size());
  c.rate.resize(channels_.size());
  coefficients(t, c.weight, c.rate);
  return c;
}

TimeLocalModel TimeLocalModel::with_horizon(double horizon) const {
  TimeLocalModel copy = *this;
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("TimeLocalModel::with_horizon: horizon must be positive");
  }
  copy.horizon_ = horizon;
  return copy;
}

ComplexMatrix lgks_rhs(const TimeLocalModel& model, const ComplexMatrix& rho, double t) {
  const auto d = static_cast<Eigen::Index>(model.dim());
  if (rho.rows() != d || rho.cols() != d) {
    throw DimensionError(fmt::format("lgks_rhs: rho is {}x{}, model dimension {}", rho.rows(), rho.cols(), d));
  }
  const std::size_t n = model.channel_count();
  std::vector<double> weight(n);
  std::vector<double> rate(n);
  model.coefficients(t, weight, rate);

  // With rho Hermitian: -i[H, rho] - sum w {K, rho}/2 = X + X^dagger where
  // X = (-iH - sum w K / 2) rho, and L rho L^dagger = L (L rho)^dagger.
  ComplexMatrix x = -kI * model.hamiltonian().apply(t, rho);
  ComplexMatrix jumps = ComplexMatrix::Zero(d, d);
  for (std::size_t l = 0; l < n; ++l) {
    if (weight[l] == 0.0) {
      continue;
    }
    x.noalias() -= (0.5 * weight[l]) * (model.number(l) * rho);
    const ComplexMatrix lr = model.jump(l) * rho;
    jumps.noalias() += weight[l] * (model.jump(l) * lr.adjoint());
  }
  ComplexMatrix out = x + x.adjoint();
  out += 0.5 * (jumps + jumps.adjoint());
  return out;
}

ComplexMatrix lgks_rhs(const TimeLocalModel& model, const HermitianMatrix& rho, double t) {
  return lgks_rhs(model, rho.matrix(), t);
}

ValidationReport validate(const TimeLocalModel& model, const ValidationOptions& options) {
  ValidationReport report;
  const double horizon =
      std::isfinite(model.horizon()) ? model.horizon() : options.fallback_horizon;
  const int samples = std::max(options.samples, 2);
  const std::size_t n = model.channel_count();

  std::set<std::string> seen;
  // Sampled checks report the first offending time only, once per key.
  auto add_once = [&report, &seen](const std::string& key, std::string msg) {
    if (seen.insert(key).second) {
      report.violations.push_back(std::move(msg));
    }
  };
  auto add = [&add_once](std::string msg) { add_once(msg, msg); };

  if (model.bare_hamiltonian() && !is_hermitian(*model.bare_hamiltonian(), options.hermitian_tolerance)) {
    add("bare Hamiltonian H0 is not Hermitian");
  }

  for (std::size_t l = 0; l < n; ++l) {
    const auto& ch = model.channel(l);
    if (const auto* c = std::get_if<rate::Constant>(&ch.rate); c && !(c->value > 0.0)) {
      add(fmt::format("channel {}: constant rate {} is not strictly positive", ch.name, c->value));
    }
    if (const auto bound = ch.weight.declared_bound()) {
      const double sup = ch.weight.sampled_sup(0.0, horizon, samples);
      if (sup > *bound * (1.0 + 1e-9)) {
        add(fmt::format("channel {}: |weight| reaches {} above declared bound {}", ch.name, sup, *bound));
      }
    }
  }

  std::vector<double> weight(n);
  std::vector<double> rate(n);
  for (int k = 0; k < samples; ++k) {
    const double t = horizon * k / (samples - 1);
    const ComplexMatrix h = model.hamiltonian_at(t);
    if (!all_finite(h)) {
      add_once("h-finite", "Hamiltonian is not finite on the horizon");
    } else if (!is_hermitian(h, options.hermitian_tolerance)) {
      add_once("h-hermitian",
               fmt::format("Hamiltonian is not Hermitian (defect {:.3e} at t={})", hermiticity_defect(h), t));
    }
    try {
      model.coefficients(t, weight, rate);
    } catch (const NonFiniteError& e) {
      add_once("weight-finite", e.what());
      continue;
    }
    for (std::size_t l = 0; l < n; ++l) {
      const auto& ch = model.channel(l);
      const auto* fixed = std::get_if<rate::Constant>(&ch.rate);
      if (fixed && !(fixed->value > 0.0)) {
        // Already reported above.
      } else if (!std::isfinite(rate[l])) {
        add_once("rate-finite" + ch.name, fmt::format("channel {}: rate is not finite", ch.name));
      } else if (rate[l] < 0.0) {
        add_once("rate-negative" + ch.name, fmt::format("channel {}: negative rate {} at t={}", ch.name, rate[l], t));
      } else if (rate[l] == 0.0 && weight[l] != 0.0) {
        add_once("rate-zero" + ch.name, fmt::format("channel {}: zero rate with nonzero weight at t={}", ch.name, t));
      }
      if (const auto* s = std::get_if<rate::Shifted>(&ch.rate)) {
        const double c = s->split(t, weight[l], weight[s->partner]);
        if (!(c <= 0.0)) {
          add_once("shift" + ch.name, fmt::format("channel {}: rate shift {} must be non-positive at t={}", ch.name, c, t));
        }
      }
    }
  }
  return report;
}

}  // namespace qtraj
