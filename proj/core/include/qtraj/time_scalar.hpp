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

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qtraj {

/// A real function of time: a weight Gamma(t), a rate r(t), a Lamb shift or a
/// Hamiltonian coefficient.
///
/// Three representations share one value type: constants, callables and
/// sample tables with linear interpolation (clamped at the ends). Evaluation
/// is const and re-entrant; callables must not keep mutable state.
class TimeScalar {
 public:
  using Function = std::function<double(double)>;

  /// Zero.
  TimeScalar();

  static TimeScalar constant(double value);
  /// `bound` is the user-declared sup |f| over the horizon. It is recorded,
  /// not verified.
  static TimeScalar function(Function f, std::optional<double> bound = std::nullopt,
                             std::string description = {});
  /// Strictly increasing `times`, same length as `values`, at least one sample.
  static TimeScalar tabulated(std::vector<double> times, std::vector<double> values);

  double operator()(double t) const;

  bool is_constant() const { return kind_ == Kind::Constant; }
  bool is_tabulated() const { return kind_ == Kind::Table; }
  std::optional<double> declared_bound() const { return bound_; }
  const std::string& description() const { return description_; }

  /// Largest |f| over samples of [t0, t1]. For diagnostics only.
  double sampled_sup(double t0, double t1, int samples = 1001) const;

 private:
  enum class Kind { Constant, Function, Table };

  Kind kind_ = Kind::Constant;
  double constant_ = 0.0;
  std::shared_ptr<const Function> fn_;
  std::shared_ptr<const std::vector<double>> times_;
  std::shared_ptr<const std::vector<double>> values_;
  std::optional<double> bound_;
  std::string description_;
};

}  // namespace qtraj
