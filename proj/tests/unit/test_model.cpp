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
#include <random>

#include "qtraj/model.hpp"
#include "qtraj/models.hpp"
#include "qtraj_test/oracles.hpp"

namespace qtraj {
namespace {

// -i[H, rho] + sum_l w_l (L rho L^dagger - {L^dagger L, rho} / 2), written densely.
ComplexMatrix dense_generator(const TimeLocalModel& m, const ComplexMatrix& rho, double t) {
  const ComplexMatrix h = m.hamiltonian_at(t);
  ComplexMatrix out = -kI * (h * rho - rho * h);
  const auto c = m.coefficients(t);
  for (std::size_t l = 0; l < m.channel_count(); ++l) {
    const ComplexMatrix op = to_dense(m.channel(l).op);
    const ComplexMatrix n = op.adjoint() * op;
    out += c.weight[l] * (op * rho * op.adjoint() - 0.5 * (n * rho + rho * n));
  }
  return out;
}

TimeLocalModel random_model(std::mt19937_64& gen, Eigen::Index dim, int channels) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Hamiltonian h(to_sparse(testing::random_hermitian(gen, dim)));
  const double f = u(gen);
  h.add_term(TimeScalar::function([f](double t) { return std::cos(f * t); }, 1.0),
             to_sparse(testing::random_hermitian(gen, dim)));
  std::vector<Channel> ch;
  for (int l = 0; l < channels; ++l) {
    const double a = u(gen), b = u(gen);
    ch.push_back({"c" + std::to_string(l), to_sparse(testing::random_matrix(gen, dim)),
                  TimeScalar::function([a, b](double t) { return a + b * std::sin(t); }, std::abs(a) + std::abs(b)),
                  rate::AbsValue{}, std::nullopt});
  }
  return TimeLocalModel(static_cast<std::size_t>(dim), std::move(h), std::move(ch));
}

TEST(Model, GeneratorMatchesDenseFormula) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = random_model(gen, 3 + trial % 2, 1 + trial);
    const ComplexMatrix rho = testing::random_density(gen, static_cast<Eigen::Index>(m.dim()));
    for (double t : {0.0, 0.37, 2.5}) {
      const ComplexMatrix got = lgks_rhs(m, rho, t);
      EXPECT_LT(max_abs(got - dense_generator(m, rho, t)), 1e-12);
      EXPECT_LT(std::abs(got.trace()), 1e-12);
      EXPECT_LT(hermiticity_defect(got), 1e-12);
    }
  }
}

TEST(Model, DecayGeneratorAtExcitedState) {
  const auto m = models::build_decay(TimeScalar::constant(0.7));
  const ComplexMatrix rho = outer(qubit::excited(), qubit::excited());
  const ComplexMatrix d = lgks_rhs(m, rho, 0.0);
  EXPECT_NEAR(d(0, 0).real(), -0.7, 1e-15);
  EXPECT_NEAR(d(1, 1).real(), 0.7, 1e-15);
  EXPECT_THROW(lgks_rhs(m, ComplexMatrix::Zero(3, 3), 0.0), DimensionError);
}

TEST(Model, RatePolicies) {
  auto neg = TimeScalar::function([](double t) { return -1.0 + t; }, 2.0);
  std::vector<Channel> ch;
  ch.push_back({"abs", qubit::sigma_minus(), neg, rate::AbsValue{}, std::nullopt});
  ch.push_back({"const", qubit::sigma_plus(), neg, rate::Constant{2.5}, std::nullopt});
  ch.push_back({"custom", qubit::sigma_z(), neg, rate::Custom{TimeScalar::function([](double t) { return 3.0 + t; })},
                std::nullopt});
  const TimeLocalModel m(2, Hamiltonian(), ch);
  const auto c = m.coefficients(0.25);
  EXPECT_DOUBLE_EQ(c.weight[0], -0.75);
  EXPECT_DOUBLE_EQ(c.rate[0], 0.75);
  EXPECT_DOUBLE_EQ(c.rate[1], 2.5);
  EXPECT_DOUBLE_EQ(c.rate[2], 3.25);
}

TEST(Model, ShiftedPairMovesBothRates) {
  std::vector<Channel> ch;
  ch.push_back({"a", qubit::sigma_minus(), TimeScalar::constant(-1.0),
                rate::Shifted{1, [](double, double, double) { return -0.5; }}, std::nullopt});
  ch.push_back({"b", qubit::sigma_plus(), TimeScalar::constant(0.2), rate::AbsValue{}, std::nullopt});
  const TimeLocalModel m(2, Hamiltonian(), ch);
  const auto c = m.coefficients(0.0);
  EXPECT_DOUBLE_EQ(c.rate[0], -0.5);
  EXPECT_DOUBLE_EQ(c.rate[1], 0.7);
  EXPECT_FALSE(validate(m).ok());
}

TEST(Model, ConstructionRejectsInconsistentInput) {
  EXPECT_THROW(TimeLocalModel(3, Hamiltonian(qubit::sigma_z()), {}), DimensionError);
  std::vector<Channel> zero{{"z", SparseOperator(2, 2), TimeScalar::constant(1.0), rate::AbsValue{}, std::nullopt}};
  EXPECT_THROW(TimeLocalModel(2, Hamiltonian(), zero), std::invalid_argument);
  std::vector<Channel> self{{"s", qubit::sigma_minus(), TimeScalar::constant(1.0),
                             rate::Shifted{0, [](double, double, double) { return 0.0; }}, std::nullopt}};
  EXPECT_THROW(TimeLocalModel(2, Hamiltonian(), self), std::invalid_argument);
  EXPECT_THROW(TimeLocalModel(2, Hamiltonian(), {}, std::nullopt, -1.0), std::invalid_argument);
}

TEST(Model, NonFiniteWeightRaisesWithTime) {
  std::vector<Channel> ch{{"bad", qubit::sigma_minus(),
                           TimeScalar::function([](double t) { return t > 0.5 ? NAN : 1.0; }), rate::AbsValue{},
                           std::nullopt}};
  const TimeLocalModel m(2, Hamiltonian(), ch);
  EXPECT_NO_THROW(m.coefficients(0.1));
  try {
    m.coefficients(0.75);
    FAIL();
  } catch (const NonFiniteError& e) {
    EXPECT_DOUBLE_EQ(e.time(), 0.75);
  }
}

TEST(Validate, BuiltInModelsAreClean) {
  EXPECT_TRUE(validate(models::build_decay()).ok());
  EXPECT_TRUE(validate(models::build_controllable()).ok());
  EXPECT_TRUE(validate(models::build_redfield()).ok());
  EXPECT_TRUE(validate(models::build_chain({})).ok());
}

TEST(Validate, ReportsEachProblemOnce) {
  Hamiltonian h;
  ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  h.add_term(TimeScalar::constant(1.0), to_sparse(bad));
  std::vector<Channel> ch;
  ch.push_back({"neg", qubit::sigma_minus(), TimeScalar::constant(1.0), rate::Constant{-1.0}, std::nullopt});
  ch.push_back({"dormant", qubit::sigma_plus(), TimeScalar::constant(1.0), rate::Constant{0.0}, std::nullopt});
  const TimeLocalModel m(2, std::move(h), ch);
  const auto report = validate(m);
  ASSERT_EQ(report.violations.size(), 3u);
}

}  // namespace
}  // namespace qtraj
