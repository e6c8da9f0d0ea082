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

#include <memory>
#include <string>
#include <string_view>

#include "qtraj/time_scalar.hpp"

namespace qtraj {

/// Arithmetic expressions in one variable `t`, used for weights, rates and
/// coefficients in model files.
///
/// Grammar: + - * / ^ (right associative), unary minus, parentheses,
/// constants `pi`, numbers in decimal or exponent notation, and the functions
/// sin cos tan exp log sqrt abs tanh sinh cosh atan sign (one argument) and
/// min max pow (two arguments).
class Expression {
 public:
  /// Throws ConfigError with a column position on malformed input.
  static Expression parse(std::string_view source);

  double evaluate(double t) const;
  bool depends_on_time() const;
  const std::string& source() const { return source_; }

  TimeScalar to_time_scalar() const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

/// Parses a constant expression such as "sqrt(2)" or "1/0.129".
double parse_constant(std::string_view source);

}  // namespace qtraj
