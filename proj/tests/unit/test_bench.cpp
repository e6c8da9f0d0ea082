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

#include "qtraj/bench.hpp"

namespace qtraj {
namespace {

TEST(Bench, RmsErrorSkipsInitialTime) {
  const std::vector<std::vector<double>> mc{{9.0, 1.0, 2.0}, {9.0, 0.0, 0.0}};
  const std::vector<std::vector<double>> oracle{{0.0, 1.0, 1.0}, {0.0, 1.0, 0.0}};
  EXPECT_NEAR(bench::rms_error(mc, oracle), std::sqrt(2.0 / 4.0), 1e-15);
  EXPECT_THROW(bench::rms_error({{1.0}}, {{1.0}}), std::invalid_argument);
  EXPECT_THROW(bench::rms_error({{1.0, 2.0}}, {{1.0}}), std::invalid_argument);
}

TEST(Bench, SmallSweepIsAccurate) {
  bench::BenchConfig c;
  c.sizes = {2, 3};
  c.realizations = 1000;
  c.repeats = 1;
  c.parallel_threads = 2;
  const auto rows = bench::sweep(c);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.dim, std::size_t{1} << r.n);
    ASSERT_TRUE(r.rms_error.has_value());
    // Site populations are O(1); 1000 samples give errors of a few percent.
    EXPECT_LT(*r.rms_error, 0.08);
    EXPECT_GT(*r.rms_error, 0.0);
    EXPECT_TRUE(r.wall_ms_oracle.has_value());
    EXPECT_EQ(r.oracle_entries, std::uint64_t{1} << (2 * r.n));
  }
}

TEST(Bench, RmsIsIndependentOfThreadsAndRepeats) {
  bench::BenchConfig c;
  c.sizes = {2};
  c.realizations = 200;
  c.repeats = 1;
  c.parallel_threads = 1;
  const auto a = bench::sweep(c);
  c.parallel_threads = 3;
  c.repeats = 2;
  const auto b = bench::sweep(c);
  EXPECT_EQ(*a[0].rms_error, *b[0].rms_error);
}

TEST(Bench, CapsAreEnforced) {
  bench::BenchConfig c;
  c.sizes = {3};
  c.realizations = 50;
  c.repeats = 1;
  c.oracle_entry_cap = 16;
  const auto rows = bench::sweep(c);
  EXPECT_FALSE(rows[0].wall_ms_oracle.has_value());
  EXPECT_FALSE(rows[0].rms_error.has_value());
  c.trajectory_entry_cap = 4;
  EXPECT_THROW(bench::sweep(c), std::invalid_argument);
  c.sizes = {1};
  EXPECT_THROW(bench::sweep(c), std::invalid_argument);
}

}  // namespace
}  // namespace qtraj
