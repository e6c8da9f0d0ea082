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


// Randomized checks over generated models. Seeds are fixed so failures
// reproduce.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qtraj/ensemble.hpp"
#include "qtraj/master_eq.hpp"
#include "qtraj_test/oracles.hpp"

namespace qtraj {
namespace {

// Random model with `dim` levels, a static Hamiltonian and channels whose
// weights -a + b sin(f t) may change sign.
TimeLocalModel random_model(std::mt19937_64& gen, Eigen::Index dim, int channels, bool completely_positive) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Channel> ch;
  for (int l = 0; l < channels; ++l) {
    const double a = completely_positive ? u(gen) + 0.1 : u(gen) - 0.5;
    const double b = completely_positive ? 0.0 : u(gen);
    const double f = 1.0 + 3.0 * u(gen);
    ComplexMatrix op = testing::random_matrix(gen, dim);
    op /= op.norm();
    ch.push_back({"c" + std::to_string(l), to_sparse(op),
                  TimeScalar::function([a, b, f](double t) { return a + b * std::sin(f * t); },
                                       std::abs(a) + std::abs(b)),
                  rate::AbsValue{}, std::nullopt});
  }
  return TimeLocalModel(static_cast<std::size_t>(dim), Hamiltonian(to_sparse(testing::random_hermitian(gen, dim))),
                        std::move(ch));
}

TEST(Properties, GeneratorIsTraceFreeAndHermitian) {
  std::mt19937_64 gen(101);
  for (int trial = 0; trial < 50; ++trial) {
    const auto dim = static_cast<Eigen::Index>(2 + trial % 4);
    const auto m = random_model(gen, dim, 1 + trial % 3, trial % 2 == 0);
    const ComplexMatrix rho = testing::random_density(gen, dim);
    const ComplexMatrix d = lgks_rhs(m, rho, 0.1 * trial);
    EXPECT_LT(std::abs(d.trace()), 1e-12);
    EXPECT_LT(hermiticity_defect(d), 1e-12);
  }
}

TEST(Properties, CompletelyPositiveOracleStaysPositive) {
  std::mt19937_64 gen(202);
  for (int trial = 0; trial < 10; ++trial) {
    const auto dim = static_cast<Eigen::Index>(2 + trial % 3);
    const auto m = random_model(gen, dim, 2, true);
    const ComplexVector psi = testing::random_state(gen, dim);
    const auto s = integrate(m, HermitianMatrix(outer(psi, psi)), uniform_grid(0.0, 2.0, 20), 1e-3);
    EXPECT_LT(trace_drift(s), 1e-10);
    for (double ev : min_eigenvalues(s)) EXPECT_GT(ev, -1e-9);
  }
}

TEST(Properties, EnsembleInvariants) {
  std::mt19937_64 gen(303);
  for (int trial = 0; trial < 6; ++trial) {
    const auto dim = static_cast<Eigen::Index>(2 + trial % 3);
    const auto m = random_model(gen, dim, 2, false);
    const ComplexVector psi = testing::random_state(gen, dim);
    EnsembleConfig c;
    c.realizations = 400;
    c.master_seed = static_cast<std::uint64_t>(trial);
    c.grid = uniform_grid(0.0, 1.0, 10);
    c.scheme.scheme = trial % 2 ? JumpScheme::WaitingTime : JumpScheme::Bernoulli;
    c.observables = {basis_projector("p0", 0, static_cast<std::size_t>(dim))};
    const auto a = run(m, psi, c);
    c.threads = 3;
    const auto b = run(m, psi, c);
    EXPECT_EQ(a.observables[0].mean, b.observables[0].mean);
    // Sign flips on a weak negative channel are rare, so the sample stderr can
    // collapse when none occur. Hoeffding on the observed |mu| range does not.
    std::vector<double> bound(c.grid.size(), 0.0);
    for (std::size_t i = 0; i < c.realizations; ++i) {
      const auto rec = replay(m, psi, c, i);
      for (std::size_t k = 0; k < c.grid.size(); ++k) bound[k] = std::max(bound[k], std::abs(rec.mu[k]));
    }
    for (std::size_t k = 0; k < c.grid.size(); ++k) {
      const ComplexMatrix rho = a.rho_hat(k);
      EXPECT_LT(hermiticity_defect(rho), 1e-13);
      EXPECT_NEAR(rho.trace().real(), a.mu.mean[k], 1e-12);
      EXPECT_NEAR(rho(0, 0).real(), a.observables[0].mean[k], 1e-12);
      // E[mu] = 1. Two-sided Hoeffding at failure probability 1e-6.
      const double hoeffding = bound[k] * std::sqrt(2.0 * std::log(2e6) / static_cast<double>(c.realizations));
      EXPECT_LE(std::abs(a.mu.mean[k] - 1.0), std::max(5.0 * a.mu.std_error[k], hoeffding) + 1e-12);
    }
  }
}

TEST(Properties, MartingaleSignChangesOnlyAtJumps) {
  std::mt19937_64 gen(404);
  const auto m = random_model(gen, 3, 2, false);
  EnsembleConfig c;
  c.realizations = 50;
  c.grid = uniform_grid(0.0, 1.0, 200);
  const ComplexVector psi = testing::random_state(gen, 3);
  for (std::size_t i = 0; i < c.realizations; ++i) {
    const auto rec = replay(m, psi, c, i);
    std::size_t next = 0;
    double sign = 1.0;
    for (std::size_t k = 0; k < c.grid.size(); ++k) {
      while (next < rec.jumps.size() && rec.jumps[next].time <= c.grid[k]) {
        sign = rec.jumps[next].mu > 0 ? 1.0 : (rec.jumps[next].mu < 0 ? -1.0 : 0.0);
        ++next;
      }
      if (sign == 0.0) {
        EXPECT_EQ(rec.mu[k], 0.0);
      } else {
        EXPECT_GT(sign * rec.mu[k], 0.0);
      }
      EXPECT_NEAR(rec.psi[k].norm(), 1.0, 1e-10);
    }
  }
}

}  // namespace
}  // namespace qtraj
