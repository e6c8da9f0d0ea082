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

#include "qtraj/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace qtraj {

namespace {

constexpr double kDarkThreshold = 1e-14;
constexpr double kPhiMin = 1e-150;
constexpr double kPhiMax = 1e150;

long equal_steps(double width, double dt) {
  return static_cast<long>(std::max(1.0, std::ceil(width / dt - 1e-9)));
}

void check_unit(const ComplexVector& v, const char* who) {
  if (std::abs(v.squaredNorm() - 1.0) > 1e-8) {
    throw std::invalid_argument(fmt::format("{}: initial vector is not normalized", who));
  }
}

}  // namespace

void SchemeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("SchemeConfig: dt must be positive");
  }
  if (!(p_max > 0.0 && p_max <= 0.2)) {
    throw std::invalid_argument("SchemeConfig: p_max must lie in (0, 0.2]");
  }
}

double TrajectoryState::mu() const {
  if (mu_sign == 0) {
    return 0.0;
  }
  return mu_sign * std::exp(log_mu_magnitude);
}

TrajectoryState TrajectoryState::initial(const ComplexVector& psi0, double t0, Representation representation) {
  check_unit(psi0, "TrajectoryState::initial");
  TrajectoryState s;
  s.t = t0;
  s.psi = psi0 / psi0.norm();
  if (representation == Representation::LinearNormalized) {
    s.phi = s.psi;
  }
  return s;
}

TrajectoryStepper::TrajectoryStepper(const TimeLocalModel& model, SchemeConfig scheme)
    : model_(model), scheme_(scheme), linear_(scheme.representation == Representation::LinearNormalized) {
  scheme_.validate();
  const std::size_t n = model_.channel_count();
  for (auto* v : {&w0_, &r0_, &w1_, &r1_, &w2_, &r2_}) {
    v->resize(n);
  }
}

void TrajectoryStepper::evaluate_coefficients(double t, std::vector<double>& weight,
                                              std::vector<double>& rate) const {
  model_.coefficients(t, weight, rate);
  for (std::size_t l = 0; l < weight.size(); ++l) {
    const double r = rate[l];
    if (!std::isfinite(r) || r < 0.0 || (r == 0.0 && weight[l] != 0.0)) {
      throw Error(fmt::format("channel {}: rate {} is not admissible for weight {} at t={}",
                              model_.channel(l).name, r, weight[l], t));
    }
  }
}

double TrajectoryStepper::norm_expectation(std::size_t l, const ComplexVector& y) {
  scratch_.noalias() = model_.number(l) * y;
  return y.dot(scratch_).real() / y.squaredNorm();
}

std::pair<double, double> TrajectoryStepper::derivative(const std::vector<double>& weight,
                                                        const std::vector<double>& rate, double t,
                                                        const ComplexVector& y, ComplexVector& out,
                                                        bool linear) {
  model_.hamiltonian().apply(t, y, out);
  out *= -kI;
  const double norm2 = y.squaredNorm();
  double log_mu_rate = 0.0;
  double hazard_rate = 0.0;
  double shift = 0.0;
  for (std::size_t l = 0; l < weight.size(); ++l) {
    const double w = weight[l];
    const double r = rate[l];
    if (w == 0.0 && r == 0.0) {
      continue;
    }
    scratch_.noalias() = model_.number(l) * y;
    const double e = y.dot(scratch_).real() / norm2;
    if (w != 0.0) {
      out.noalias() -= (0.5 * w) * scratch_;
      shift += 0.5 * w * e;
    }
    log_mu_rate += (r - w) * e;
    hazard_rate += r * e;
  }
  if (!linear && shift != 0.0) {
    out.noalias() += shift * y;
  }
  return {log_mu_rate, hazard_rate};
}

double TrajectoryStepper::drift_raw(TrajectoryState& state, double h) {
  if (linear_ && state.phi.size() != state.psi.size()) {
    state.phi = state.psi;
    state.log_phi_scale = 0.0;
  }
  ComplexVector& y = linear_ ? state.phi : state.psi;
  const double t = state.t;
  evaluate_coefficients(t, w0_, r0_);
  evaluate_coefficients(t + 0.5 * h, w1_, r1_);
  evaluate_coefficients(t + h, w2_, r2_);

  const auto [g1, q1] = derivative(w0_, r0_, t, y, k1_, linear_);
  tmp_ = y + (0.5 * h) * k1_;
  const auto [g2, q2] = derivative(w1_, r1_, t + 0.5 * h, tmp_, k2_, linear_);
  tmp_ = y + (0.5 * h) * k2_;
  const auto [g3, q3] = derivative(w1_, r1_, t + 0.5 * h, tmp_, k3_, linear_);
  tmp_ = y + h * k3_;
  const auto [g4, q4] = derivative(w2_, r2_, t + h, tmp_, k4_, linear_);

  y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  const double log_mu_increment = (h / 6.0) * (g1 + 2.0 * g2 + 2.0 * g3 + g4);
  const double hazard_increment = (h / 6.0) * (q1 + 2.0 * q2 + 2.0 * q3 + q4);

  const double norm = y.norm();
  if (!std::isfinite(norm) || !all_finite(y) || !std::isfinite(log_mu_increment) || norm == 0.0) {
    throw NonFiniteError(fmt::format("trajectory state is not finite at t={}", t + h), t + h);
  }
  if (linear_) {
    if (norm < kPhiMin || norm > kPhiMax) {
      y /= norm;
      state.log_phi_scale += std::log(norm);
    }
    state.psi = y / y.norm();
  } else {
    // The drift preserves the unit sphere; this removes the O(h^5) RK4 defect.
    y /= norm;
  }
  state.log_mu_magnitude += log_mu_increment;
  state.t = t + h;
  return hazard_increment;
}

void TrajectoryStepper::drift(TrajectoryState& state, double dt) {
  if (!(dt >= 0.0)) {
    throw std::invalid_argument("TrajectoryStepper::drift: negative step");
  }
  if (dt == 0.0) {
    return;
  }
  drift_raw(state, dt);
}

void TrajectoryStepper::apply_jump(TrajectoryState& state, std::size_t l, double weight, double rate) {
  if (!(rate > 0.0)) {
    throw Error(fmt::format("jump on dormant channel {} at t={}", model_.channel(l).name, state.t));
  }
  if (linear_ && state.phi.size() != state.psi.size()) {
    state.phi = state.psi;
    state.log_phi_scale = 0.0;
  }
  const ComplexVector& y = linear_ ? state.phi : state.psi;
  tmp_.noalias() = model_.jump(l) * y;
  const double rel = tmp_.norm() / y.norm();
  if (!(rel > kDarkThreshold)) {
    throw DarkStateJump(fmt::format("channel {} annihilates the state at t={} (|L psi| = {:.3e})",
                                    model_.channel(l).name, state.t, rel));
  }
  if (linear_) {
    const double norm = tmp_.norm();
    state.phi = tmp_;
    if (norm < kPhiMin || norm > kPhiMax) {
      state.phi /= norm;
      state.log_phi_scale += std::log(norm);
    }
    state.psi = state.phi / state.phi.norm();
  } else {
    state.psi = tmp_ / tmp_.norm();
  }
  const double factor = weight / rate;
  if (factor == 0.0) {
    state.mu_sign = 0;
  } else {
    if (factor < 0.0) {
      state.mu_sign = -state.mu_sign;
    }
    state.log_mu_magnitude += std::log(std::abs(factor));
  }
  state.jumps.push_back({l, state.t, state.mu()});
}

void TrajectoryStepper::jump(TrajectoryState& state, std::size_t channel) {
  if (channel >= model_.channel_count()) {
    throw std::out_of_range("TrajectoryStepper::jump: channel index");
  }
  evaluate_coefficients(state.t, w0_, r0_);
  apply_jump(state, channel, w0_[channel], r0_[channel]);
}

void TrajectoryStepper::bernoulli_step(TrajectoryState& state, RandomStream& rng, double h) {
  const std::size_t n = model_.channel_count();
  if (n > 0) {
    evaluate_coefficients(state.t, w0_, r0_);
    // Copies: apply_jump below reuses the coefficient buffers.
    const std::vector<double> weight = w0_;
    const std::vector<double> rate = r0_;
    last_max_p_ = 0.0;
    std::vector<std::size_t> fired;
    for (std::size_t l = 0; l < n; ++l) {
      if (rate[l] <= 0.0) {
        continue;
      }
      const double p = rate[l] * norm_expectation(l, state.psi) * h;
      last_max_p_ = std::max(last_max_p_, p);
      if (p > scheme_.p_max) {
        throw StepTooLarge(fmt::format("jump probability {:.4f} on channel {} exceeds p_max={} at t={}",
                                       p, model_.channel(l).name, scheme_.p_max, state.t));
      }
      if (rng.uniform() < p) {
        fired.push_back(l);
      }
    }
    // At most one jump per channel, applied in ascending channel order.
    for (std::size_t k = 0; k < fired.size(); ++k) {
      const std::size_t l = fired[k];
      if (k > 0) {
        tmp_.noalias() = model_.jump(l) * state.psi;
        // An earlier jump in this step moved the state into the kernel of L:
        // an O(dt^2) event that is dropped.
        if (!(tmp_.norm() > kDarkThreshold)) {
          continue;
        }
      }
      apply_jump(state, l, weight[l], rate[l]);
    }
  }
  drift_raw(state, h);
}

std::size_t TrajectoryStepper::select_channel(const TrajectoryState& state, double t, RandomStream& rng) {
  evaluate_coefficients(t, w0_, r0_);
  const std::size_t n = model_.channel_count();
  std::vector<double> intensity(n, 0.0);
  double total = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    if (r0_[l] > 0.0) {
      intensity[l] = r0_[l] * norm_expectation(l, state.psi);
      total += intensity[l];
    }
  }
  if (!(total > 0.0)) {
    throw DarkStateJump(fmt::format("hazard threshold crossed with zero jump intensity at t={}", t));
  }
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last = n;
  for (std::size_t l = 0; l < n; ++l) {
    if (intensity[l] <= 0.0) continue;
    acc += intensity[l];
    last = l;
    if (u < acc) return l;
  }
  return last;
}

void TrajectoryStepper::waiting_time_step(TrajectoryState& state, RandomStream& rng, double h) {
  if (model_.channel_count() == 0) {
    drift_raw(state, h);
    return;
  }
  if (state.hazard_threshold < 0.0) {
    state.hazard = 0.0;
    state.hazard_threshold = rng.exponential();
  }
  const double step_end = state.t + h;
  double remaining = h;
  while (remaining > 0.0) {
    const double t0 = state.t;
    const ComplexVector psi0 = state.psi;
    const ComplexVector phi0 = state.phi;
    const double log_phi0 = state.log_phi_scale;
    const double log_mu0 = state.log_mu_magnitude;

    const double inc = drift_raw(state, remaining);
    if (state.hazard + inc < state.hazard_threshold) {
      state.hazard += inc;
      return;
    }
    // Threshold crossed inside the step: locate it by linear interpolation of
    // the hazard, redo the drift up to that point and jump there.
    const double theta = std::clamp((state.hazard_threshold - state.hazard) / inc, 0.0, 1.0);
    const double sub = theta * remaining;
    state.t = t0;
    state.psi = psi0;
    state.phi = phi0;
    state.log_phi_scale = log_phi0;
    state.log_mu_magnitude = log_mu0;
    if (sub > 0.0) {
      drift_raw(state, sub);
    }
    const std::size_t l = select_channel(state, state.t, rng);
    apply_jump(state, l, w0_[l], r0_[l]);
    state.hazard = 0.0;
    state.hazard_threshold = rng.exponential();
    remaining -= sub;
    if (remaining <= 1e-15 * std::max(1.0, std::abs(state.t))) {
      state.t = step_end;
      return;
    }
  }
}

void TrajectoryStepper::step(TrajectoryState& state, RandomStream& rng, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("TrajectoryStepper::step: dt must be positive");
  }
  if (std::abs(state.psi.squaredNorm() - 1.0) > 1e-8) {
    throw std::invalid_argument(fmt::format("TrajectoryStepper::step: state left the unit sphere at t={}", state.t));
  }
  if (scheme_.scheme == JumpScheme::Bernoulli) {
    bernoulli_step(state, rng, dt);
  } else {
    waiting_time_step(state, rng, dt);
  }
}

void TrajectoryStepper::step(TrajectoryState& state, RandomStream& rng) { step(state, rng, scheme_.dt); }

void TrajectoryStepper::advance_to(TrajectoryState& state, double t_end, RandomStream& rng) {
  const double start = state.t;
  const double width = t_end - start;
  if (width < -1e-12) {
    throw std::invalid_argument("TrajectoryStepper::advance_to: target lies in the past");
  }
  if (width <= 0.0) {
    return;
  }
  const long steps = equal_steps(width, scheme_.dt);
  const double h = width / static_cast<double>(steps);
  for (long s = 0; s < steps; ++s) {
    step(state, rng, h);
    state.t = start + static_cast<double>(s + 1) * h;
  }
  state.t = t_end;
}

TrajectoryState drift_step(const TrajectoryState& state, const TimeLocalModel& model, double dt) {
  SchemeConfig scheme;
  scheme.dt = dt;
  TrajectoryStepper stepper(model, scheme);
  TrajectoryState next = state;
  stepper.drift(next, dt);
  return next;
}

TrajectoryState jump_apply(const TrajectoryState& state, const TimeLocalModel& model, std::size_t channel) {
  TrajectoryStepper stepper(model, SchemeConfig{});
  TrajectoryState next = state;
  stepper.jump(next, channel);
  return next;
}

TrajectoryState step(const TrajectoryState& state, const TimeLocalModel& model, const SchemeConfig& scheme,
                     RandomStream& rng) {
  TrajectoryStepper stepper(model, scheme);
  TrajectoryState next = state;
  stepper.step(next, rng);
  return next;
}

namespace {

std::vector<PathPoint> propagate(const ComplexVector& y0, const TimeLocalModel& model,
                                 std::span<const JumpRecord> jumps, std::span<const double> grid, double dt,
                                 Representation representation) {
  if (grid.empty()) {
    throw std::invalid_argument("propagate: empty grid");
  }
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw std::invalid_argument("propagate: grid must increase");
  }
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    if (jumps[k].channel >= model.channel_count()) {
      throw std::out_of_range("propagate: jump channel index");
    }
    if (!(jumps[k].time > grid.front()) || jumps[k].time > grid.back()) {
      throw std::invalid_argument("propagate: jump time outside the grid span");
    }
    if (k > 0 && !(jumps[k].time > jumps[k - 1].time)) {
      throw std::invalid_argument("propagate: jump times must be strictly increasing");
    }
  }
  SchemeConfig scheme;
  scheme.dt = dt;
  scheme.representation = representation;
  TrajectoryStepper stepper(model, scheme);
  TrajectoryState state = TrajectoryState::initial(y0, grid.front(), representation);

  std::vector<PathPoint> out;
  out.reserve(grid.size());
  auto record = [&]() {
    PathPoint p;
    p.t = state.t;
    p.psi = state.psi;
    if (representation == Representation::LinearNormalized) {
      p.phi = state.phi;
      p.log_phi_scale = state.log_phi_scale;
    } else {
      p.phi = state.psi;
      p.log_phi_scale = 0.0;
    }
    p.mu = state.mu();
    out.push_back(std::move(p));
  };
  auto drift_to = [&](double target) {
    const double start = state.t;
    const double width = target - start;
    if (width <= 0.0) return;
    const long steps = equal_steps(width, dt);
    const double h = width / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
      stepper.drift(state, h);
      state.t = start + static_cast<double>(s + 1) * h;
    }
    state.t = target;
  };

  record();
  std::size_t next_jump = 0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    while (next_jump < jumps.size() && jumps[next_jump].time <= grid[k]) {
      drift_to(jumps[next_jump].time);
      stepper.jump(state, jumps[next_jump].channel);
      ++next_jump;
    }
    drift_to(grid[k]);
    record();
  }
  return out;
}

}  // namespace

std::vector<PathPoint> propagate_linear(const ComplexVector& phi0, const TimeLocalModel& model,
                                        std::span<const JumpRecord> jumps, std::span<const double> grid,
                                        double dt) {
  return propagate(phi0, model, jumps, grid, dt, Representation::LinearNormalized);
}

std::vector<PathPoint> propagate_nonlinear(const ComplexVector& psi0, const TimeLocalModel& model,
                                           std::span<const JumpRecord> jumps, std::span<const double> grid,
                                           double dt) {
  return propagate(psi0, model, jumps, grid, dt, Representation::Nonlinear);
}

GreenPropagator green_propagator(const TimeLocalModel& model, double s, double t, double dt) {
  if (t < s) {
    throw std::invalid_argument("green_propagator: requires s <= t");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("green_propagator: dt must be positive");
  }
  const auto d = static_cast<Eigen::Index>(model.dim());
  GreenPropagator g{s, t, ComplexMatrix::Identity(d, d)};
  if (t == s) {
    return g;
  }
  const std::size_t n = model.channel_count();
  std::vector<double> weight(n);
  std::vector<double> rate(n);
  auto generator = [&](double u, const ComplexMatrix& x) {
    model.coefficients(u, weight, rate);
    ComplexMatrix out = -kI * model.hamiltonian().apply(u, x);
    for (std::size_t l = 0; l < n; ++l) {
      if (weight[l] != 0.0) {
        out.noalias() -= (0.5 * weight[l]) * (model.number(l) * x);
      }
    }
    return out;
  };
  const long steps = equal_steps(t - s, dt);
  const double h = (t - s) / static_cast<double>(steps);
  ComplexMatrix& x = g.matrix;
  for (long k = 0; k < steps; ++k) {
    const double u = s + static_cast<double>(k) * h;
    const ComplexMatrix k1 = generator(u, x);
    const ComplexMatrix k2 = generator(u + 0.5 * h, x + (0.5 * h) * k1);
    const ComplexMatrix k3 = generator(u + 0.5 * h, x + (0.5 * h) * k2);
    const ComplexMatrix k4 = generator(u + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!all_finite(x)) {
      throw NonFiniteError(fmt::format("Green propagator is not finite at t={}", u + h), u + h);
    }
  }
  return g;
}

namespace {

// Drifts a linear-representation state from its time to `target`.
void linear_drift_to(TrajectoryStepper& stepper, TrajectoryState& state, double target, double dt) {
  const double start = state.t;
  const double width = target - start;
  if (width <= 0.0) return;
  const long steps = equal_steps(width, dt);
  const double h = width / static_cast<double>(steps);
  for (long s = 0; s < steps; ++s) {
    stepper.drift(state, h);
    state.t = start + static_cast<double>(s + 1) * h;
  }
  state.t = target;
}

}  // namespace

double no_jump_martingale(const TimeLocalModel& model, const ComplexVector& z, double s, double t, double dt) {
  if (t < s) {
    throw std::invalid_argument("no_jump_martingale: requires s <= t");
  }
  SchemeConfig scheme;
  scheme.dt = dt;
  scheme.representation = Representation::LinearNormalized;
  TrajectoryStepper stepper(model, scheme);
  TrajectoryState state = TrajectoryState::initial(z / z.norm(), s, Representation::LinearNormalized);
  linear_drift_to(stepper, state, t, dt);
  return std::exp(state.log_mu_magnitude);
}

double waiting_time_density(const TimeLocalModel& model, const ComplexVector& z,
                            std::span<const JumpRecord> jumps, double t, double dt, double t0) {
  check_unit(z, "waiting_time_density");
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    if (jumps[k].channel >= model.channel_count()) {
      throw std::out_of_range("waiting_time_density: jump channel index");
    }
    if (!(jumps[k].time > t0) || !(jumps[k].time < t)) {
      throw std::invalid_argument("waiting_time_density: jump times must lie in (t0, t)");
    }
    if (k > 0 && !(jumps[k].time > jumps[k - 1].time)) {
      throw std::invalid_argument("waiting_time_density: jump times must be strictly increasing");
    }
  }
  SchemeConfig scheme;
  scheme.dt = dt;
  scheme.representation = Representation::LinearNormalized;
  TrajectoryStepper stepper(model, scheme);
  // state.phi * exp(log_phi_scale) carries Lambda z; log_mu_magnitude
  // accumulates the log of the product of segment martingales.
  TrajectoryState state = TrajectoryState::initial(z, t0, Representation::LinearNormalized);
  std::vector<double> weight(model.channel_count());
  std::vector<double> rate(model.channel_count());
  for (const auto& j : jumps) {
    linear_drift_to(stepper, state, j.time, dt);
    model.coefficients(j.time, weight, rate);
    if (!(rate[j.channel] > 0.0)) {
      return 0.0;
    }
    ComplexVector next = model.jump(j.channel) * state.phi;
    const double norm = next.norm();
    if (norm == 0.0) {
      return 0.0;
    }
    state.phi = next / norm;
    state.log_phi_scale += std::log(norm) + 0.5 * std::log(rate[j.channel]);
    state.psi = state.phi;
  }
  linear_drift_to(stepper, state, t, dt);
  const double log_p = 2.0 * state.log_phi_scale + std::log(state.phi.squaredNorm()) - state.log_mu_magnitude;
  return std::exp(log_p);
}

MartingaleParts wp_decompose(std::span<const double> mu) {
  MartingaleParts parts;
  parts.plus.reserve(mu.size());
  parts.minus.reserve(mu.size());
  for (double m : mu) {
    parts.plus.push_back(std::max(0.0, m));
    parts.minus.push_back(std::max(0.0, -m));
  }
  return parts;
}

}  // namespace qtraj
