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


#include <gtest/gtest.h>

#include <cmath>

#include "qtraj/master_eq.hpp"
#include "qtraj/models.hpp"
#include "qtraj_test/oracles.hpp"

namespace qtraj {
namespace {

HermitianMatrix pure(const ComplexVector& v) { return HermitianMatrix(outer(v, v)); }

double max_decay_error(double dt) {
  const auto m = models::build_decay();
  const auto grid = uniform_grid(0.0, 1.0, 10);
  const auto s = integrate(m, pure(qubit::excited()), grid, dt);
  double err = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    err = std::max(err, std::abs(s.states[k].matrix()(0, 0).real() - testing::decay_excited(1.0, grid[k])));
  }
  return err;
}

double max_controllable_error(double dt) {
  const auto m = models::build_controllable();
  const auto grid = uniform_grid(0.0, 3.0, 30);
  const auto s = integrate(m, pure(models::controllable_initial_state()), grid, dt);
  double err = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    err = std::max(err, std::abs(s.states[k].matrix()(0, 0).real() -
                                 testing::controllable_excited(models::ControllableParams{}, 0.5, grid[k])));
  }
  return err;
}

TEST(MasterEquation, DecayMatchesClosedForm) {
  EXPECT_LT(max_decay_error(1e-3), 1e-8);
}

TEST(MasterEquation, FourthOrderUnderStepHalving) {
  const double e1 = max_decay_error(0.1);
  const double e2 = max_decay_error(0.05);
  EXPECT_GE(e1 / e2, 8.0) << e1 << " " << e2;
  const double c1 = max_controllable_error(0.05);
  const double c2 = max_controllable_error(0.025);
  EXPECT_GE(c1 / c2, 8.0) << c1 << " " << c2;
}

TEST(MasterEquation, ControllableMatchesClosedForm) {
  EXPECT_LT(max_controllable_error(1e-3), 1e-9);
}

TEST(MasterEquation, UnitaryEvolutionKeepsTrace) {
  std::mt19937_64 gen(4);
  const TimeLocalModel m(4, Hamiltonian(to_sparse(testing::random_hermitian(gen, 4))), {});
  const auto s = integrate(m, HermitianMatrix(testing::random_density(gen, 4)), uniform_grid(0.0, 5.0, 50), 1e-3);
  EXPECT_LT(trace_drift(s), 1e-10);
  for (double ev : min_eigenvalues(s)) {
    EXPECT_GT(ev, -1e-10);
  }
}

TEST(MasterEquation, AdaptiveModeMeetsTolerance) {
  IntegratorOptions opt;
  opt.adaptive = true;
  opt.dt = 0.1;
  opt.rtol = 1e-10;
  const auto grid = uniform_grid(0.0, 3.0, 6);
  const auto s = integrate(models::build_controllable(), pure(models::controllable_initial_state()), grid, opt);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(s.states[k].matrix()(0, 0).real(),
                testing::controllable_excited(models::ControllableParams{}, 0.5, grid[k]), 1e-8);
  }
}

TEST(MasterEquation, RejectsBadInput) {
  const auto m = models::build_decay();
  const auto rho = pure(qubit::excited());
  const std::vector<double> unsorted{0.0, 0.5, 0.5};
  EXPECT_THROW(integrate(m, rho, unsorted, 1e-3), std::invalid_argument);
  EXPECT_THROW(integrate(m, rho, std::vector<double>{}, 1e-3), std::invalid_argument);
  EXPECT_THROW(integrate(m, rho, uniform_grid(0, 1, 2), 0.0), std::invalid_argument);
  EXPECT_THROW(integrate(m, HermitianMatrix(0.5 * ComplexMatrix::Identity(2, 2) * 3.0), uniform_grid(0, 1, 2), 1e-3),
               std::invalid_argument);
  EXPECT_THROW(integrate(m, HermitianMatrix(ComplexMatrix::Identity(3, 3) / 3.0), uniform_grid(0, 1, 2), 1e-3),
               DimensionError);
  EXPECT_THROW(integrate(m.with_horizon(0.5), rho, uniform_grid(0, 1, 2), 1e-3), std::invalid_argument);
}

TEST(MasterEquation, NonFiniteStateIsReportedWithTime) {
  std::vector<Channel> ch{{"blowup", qubit::sigma_minus(),
                           TimeScalar::function([](double t) { return t < 0.3 ? 1.0 : INFINITY; }), rate::AbsValue{},
                           std::nullopt}};
  const TimeLocalModel m(2, Hamiltonian(), ch);
  try {
    integrate(m, pure(qubit::excited()), uniform_grid(0, 1, 10), 1e-2);
    FAIL();
  } catch (const NonFiniteError& e) {
    EXPECT_GT(e.time(), 0.29);
    EXPECT_LT(e.time(), 0.32);
  }
}

TEST(MasterEquation, ObservableSeries) {
  const auto grid = uniform_grid(0.0, 1.0, 4);
  const auto s = integrate(models::build_decay(), pure(qubit::excited()), grid, 1e-3);
  const auto z = expectation_series(s, qubit::sigma_z());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(z[k], 2.0 * std::exp(-grid[k]) - 1.0, 1e-10);
  }
}

}  // namespace
}  // namespace qtraj
