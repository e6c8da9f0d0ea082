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
#include <span>
#include <utility>
#include <vector>

#include "qtraj/linalg.hpp"
#include "qtraj/model.hpp"
#include "qtraj/rng.hpp"

namespace qtraj {

struct JumpRecord {
  std::size_t channel;
  double time;
  /// Martingale value just after the jump.
  double mu = 1.0;

  bool operator==(const JumpRecord&) const = default;
};

enum class JumpScheme { Bernoulli, WaitingTime };
enum class Representation { Nonlinear, LinearNormalized };

struct SchemeConfig {
  JumpScheme scheme = JumpScheme::Bernoulli;
  Representation representation = Representation::Nonlinear;
  /// Drift step. For WaitingTime it is also the hazard quadrature step.
  double dt = 1e-3;
  /// Largest admissible per-channel jump probability in one Bernoulli step.
  double p_max = 0.1;

  /// Throws std::invalid_argument unless dt > 0 and p_max in (0, 0.2].
  void validate() const;
};

/// One realization: the unit state vector, the influence martingale kept as
/// sign and log-magnitude, and the jump record.
struct TrajectoryState {
  double t = 0.0;
  ComplexVector psi;
  int mu_sign = 1;
  double log_mu_magnitude = 0.0;
  std::vector<JumpRecord> jumps;

  // Linear representation: the unnormalized solution is exp(log_phi_scale) * phi.
  ComplexVector phi;
  double log_phi_scale = 0.0;

  // Waiting-time scheme: integrated hazard since the last jump and the
  // exponential threshold that triggers the next one (negative: not drawn).
  double hazard = 0.0;
  double hazard_threshold = -1.0;

  double mu() const;

  /// psi0 is normalized if it is within 1e-8 of the unit sphere; otherwise
  /// std::invalid_argument.
  static TrajectoryState initial(const ComplexVector& psi0, double t0 = 0.0,
                                 Representation representation = Representation::Nonlinear);
};

/// Single-trajectory integrator with reusable scratch storage. Not
/// thread-safe; use one per worker. The model is shared read-only.
class TrajectoryStepper {
 public:
  TrajectoryStepper(const TimeLocalModel& model, SchemeConfig scheme);

  const TimeLocalModel& model() const { return model_; }
  const SchemeConfig& scheme() const { return scheme_; }

  /// RK4 on the no-jump drift over [t, t + dt], with the martingale
  /// log-magnitude integrated on the same stages.
  void drift(TrajectoryState& state, double dt);

  /// psi <- L psi / |L psi|, mu <- mu * Gamma / r. Throws DarkStateJump if
  /// |L psi| <= 1e-14.
  void jump(TrajectoryState& state, std::size_t channel);

  /// One scheme step of length dt (shortened if `dt` is given explicitly).
  void step(TrajectoryState& state, RandomStream& rng);
  void step(TrajectoryState& state, RandomStream& rng, double dt);

  /// Steps until state.t == t_end; the final step is shortened.
  void advance_to(TrajectoryState& state, double t_end, RandomStream& rng);

  /// Most recent Bernoulli jump probability over all channels.
  double last_max_probability() const { return last_max_p_; }

 private:
  struct Stage {
    ComplexVector y;
    ComplexVector k;
  };

  void evaluate_coefficients(double t, std::vector<double>& weight, std::vector<double>& rate) const;
  // Derivative of the drift at (t, y); returns d(log mu)/dt and d(hazard)/dt.
  std::pair<double, double> derivative(const std::vector<double>& weight, const std::vector<double>& rate,
                                       double t, const ComplexVector& y, ComplexVector& out, bool linear);
  // Advances without the waiting-time bookkeeping; returns the hazard increment.
  double drift_raw(TrajectoryState& state, double dt);
  void waiting_time_step(TrajectoryState& state, RandomStream& rng, double dt);
  void bernoulli_step(TrajectoryState& state, RandomStream& rng, double dt);
  std::size_t select_channel(const TrajectoryState& state, double t, RandomStream& rng);
  double norm_expectation(std::size_t l, const ComplexVector& y);
  void apply_jump(TrajectoryState& state, std::size_t channel, double weight, double rate);

  const TimeLocalModel& model_;
  SchemeConfig scheme_;
  bool linear_;
  std::vector<double> w0_, r0_, w1_, r1_, w2_, r2_;
  ComplexVector k1_, k2_, k3_, k4_, tmp_, scratch_;
  double last_max_p_ = 0.0;
};

// Value-returning forms of the stepper operations.
TrajectoryState drift_step(const TrajectoryState& state, const TimeLocalModel& model, double dt);
TrajectoryState jump_apply(const TrajectoryState& state, const TimeLocalModel& model,
                           std::size_t channel);
TrajectoryState step(const TrajectoryState& state, const TimeLocalModel& model,
                     const SchemeConfig& scheme, RandomStream& rng);

/// A point of a deterministic (given the jump record) path.
struct PathPoint {
  double t;
  ComplexVector psi;
  /// Linear solution divided by exp(log_phi_scale); equals psi on nonlinear paths.
  ComplexVector phi;
  double log_phi_scale;
  double mu;
};

/// Solves the linear no-jump equation between the recorded jumps, applying
/// phi <- L phi at each jump time, and reports phi and psi = phi / |phi| at the
/// grid times. Jump times must lie strictly inside (grid.front(), grid.back()].
std::vector<PathPoint> propagate_linear(const ComplexVector& phi0, const TimeLocalModel& model,
                                        std::span<const JumpRecord> jumps, std::span<const double> grid,
                                        double dt);

/// Same record, nonlinear drift on the unit sphere.
std::vector<PathPoint> propagate_nonlinear(const ComplexVector& psi0, const TimeLocalModel& model,
                                           std::span<const JumpRecord> jumps,
                                           std::span<const double> grid, double dt);

struct GreenPropagator {
  double s;
  double t;
  ComplexMatrix matrix;
};

/// dG/du = (-i H_u - sum_l Gamma_{l,u} L^dagger L / 2) G, G(s) = identity.
GreenPropagator green_propagator(const TimeLocalModel& model, double s, double t, double dt);

/// Probability density of the jump record {(l_i, s_i)} on (t0, t] given the
/// initial unit vector z: |Lambda z|^2 over the product of the no-jump
/// martingale values of each inter-jump segment.
double waiting_time_density(const TimeLocalModel& model, const ComplexVector& z,
                            std::span<const JumpRecord> jumps, double t, double dt, double t0 = 0.0);

/// No-jump martingale value m_{t,s}(z).
double no_jump_martingale(const TimeLocalModel& model, const ComplexVector& z, double s, double t,
                          double dt);

struct MartingaleParts {
  std::vector<double> plus;
  std::vector<double> minus;
};

/// mu+ = max(0, mu), mu- = max(0, -mu).
MartingaleParts wp_decompose(std::span<const double> mu);

}  // namespace qtraj
