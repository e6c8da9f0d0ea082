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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qtraj/bench.hpp"
#include "qtraj/ensemble.hpp"
#include "qtraj/model.hpp"

namespace qtraj::cli {

enum class Method { Oracle, Trajectories, Both };

/// A model built from a config, with its initial state and observables.
struct ModelSetup {
  std::string name;
  std::shared_ptr<const TimeLocalModel> model;
  ComplexVector psi0;
  std::vector<Observable> observables;
};

struct RunConfig {
  ModelSetup setup;
  Method method = Method::Both;
  double horizon = 1.0;
  double dt = 1e-3;
  double oracle_dt = 1e-3;
  std::size_t intervals = 50;
  std::size_t realizations = 1000;
  std::uint64_t seed = 1;
  SchemeConfig scheme;
  unsigned threads = 1;
  std::filesystem::path out_dir = "out";
  /// Every key of the file as "section.key" -> value, thread count excluded.
  std::map<std::string, std::string> echo;

  std::vector<double> grid() const;
};

struct BenchFileConfig {
  bench::BenchConfig bench;
  std::filesystem::path out_dir = "out";
  std::string file_name = "bench.csv";
};

/// All loaders throw ConfigError for unreadable files, syntax errors,
/// unknown keys and out-of-range values.
RunConfig load_run_config(const std::filesystem::path& path);
BenchFileConfig load_bench_config(const std::filesystem::path& path);
/// Reads only the [model], [channel ...] and [initial] sections.
ModelSetup load_model(const std::filesystem::path& path);

/// "re,im re,im ..." with optional imaginary parts.
ComplexVector parse_vector_literal(const std::string& text);
/// Rows of vector literals separated by ';'.
ComplexMatrix parse_matrix_literal(const std::string& text);

}  // namespace qtraj::cli
