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

#include "qtraj/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "qtraj/errors.hpp"

namespace qtraj {

struct Expression::Node {
  enum class Op { Number, Time, Neg, Add, Sub, Mul, Div, Pow, Call1, Call2 };
  Op op = Op::Number;
  double value = 0.0;
  double (*fn1)(double) = nullptr;
  double (*fn2)(double, double) = nullptr;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  double eval(double t) const {
    switch (op) {
      case Op::Number: return value;
      case Op::Time: return t;
      case Op::Neg: return -lhs->eval(t);
      case Op::Add: return lhs->eval(t) + rhs->eval(t);
      case Op::Sub: return lhs->eval(t) - rhs->eval(t);
      case Op::Mul: return lhs->eval(t) * rhs->eval(t);
      case Op::Div: return lhs->eval(t) / rhs->eval(t);
      case Op::Pow: return std::pow(lhs->eval(t), rhs->eval(t));
      case Op::Call1: return fn1(lhs->eval(t));
      case Op::Call2: return fn2(lhs->eval(t), rhs->eval(t));
    }
    return 0.0;
  }

  bool uses_time() const {
    if (op == Op::Time) return true;
    return (lhs && lhs->uses_time()) || (rhs && rhs->uses_time());
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

double sign_of(double x) { return (x > 0.0) - (x < 0.0); }
double abs_of(double x) { return std::fabs(x); }
double min_of(double a, double b) { return std::fmin(a, b); }
double max_of(double a, double b) { return std::fmax(a, b); }
double pow_of(double a, double b) { return std::pow(a, b); }

struct Unary {
  const char* name;
  double (*fn)(double);
};
struct Binary {
  const char* name;
  double (*fn)(double, double);
};

// Wrapped through lambdas: taking the address of overloaded std functions is
// not portable.
const Unary kUnary[] = {
    {"sin", [](double x) { return std::sin(x); }},   {"cos", [](double x) { return std::cos(x); }},
    {"tan", [](double x) { return std::tan(x); }},   {"exp", [](double x) { return std::exp(x); }},
    {"log", [](double x) { return std::log(x); }},   {"sqrt", [](double x) { return std::sqrt(x); }},
    {"abs", abs_of},                                 {"tanh", [](double x) { return std::tanh(x); }},
    {"sinh", [](double x) { return std::sinh(x); }}, {"cosh", [](double x) { return std::cosh(x); }},
    {"atan", [](double x) { return std::atan(x); }}, {"sign", sign_of},
};
const Binary kBinary[] = {{"min", min_of}, {"max", max_of}, {"pow", pow_of}};

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr number(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->value = v;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != src_.size()) {
      fail("unexpected trailing input");
    }
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(fmt::format("expression '{}': {} at column {}", src_, msg, pos_ + 1));
  }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) {
      return make(Op::Pow, base, unary());
    }
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view name = src_.substr(start, pos_ - start);
      if (name == "t") return make(Op::Time);
      if (name == "pi") return number(std::numbers::pi);
      for (const auto& u : kUnary) {
        if (name == u.name) {
          if (!accept('(')) fail(fmt::format("expected '(' after {}", name));
          NodePtr arg = expr();
          if (!accept(')')) fail("expected ')'");
          auto n = std::make_shared<Expression::Node>();
          n->op = Op::Call1;
          n->fn1 = u.fn;
          n->lhs = std::move(arg);
          return n;
        }
      }
      for (const auto& b : kBinary) {
        if (name == b.name) {
          if (!accept('(')) fail(fmt::format("expected '(' after {}", name));
          NodePtr a0 = expr();
          if (!accept(',')) fail("expected ','");
          NodePtr a1 = expr();
          if (!accept(')')) fail("expected ')'");
          auto n = std::make_shared<Expression::Node>();
          n->op = Op::Call2;
          n->fn2 = b.fn;
          n->lhs = std::move(a0);
          n->rhs = std::move(a1);
          return n;
        }
      }
      pos_ = start;
      fail(fmt::format("unknown identifier '{}'", name));
    }
    fail(fmt::format("unexpected character '{}'", c));
  }

  NodePtr parse_number() {
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double v = 0.0;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(res.ptr - begin);
    return number(v);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view source) {
  Expression e;
  e.source_ = std::string(source);
  e.root_ = Parser(e.source_).parse();
  return e;
}

double Expression::evaluate(double t) const { return root_->eval(t); }

bool Expression::depends_on_time() const { return root_->uses_time(); }

TimeScalar Expression::to_time_scalar() const {
  if (!depends_on_time()) {
    return TimeScalar::constant(evaluate(0.0));
  }
  auto root = root_;
  return TimeScalar::function([root](double t) { return root->eval(t); }, std::nullopt, source_);
}

double parse_constant(std::string_view source) {
  const Expression e = Expression::parse(source);
  if (e.depends_on_time()) {
    throw ConfigError(fmt::format("'{}' must not depend on t", source));
  }
  return e.evaluate(0.0);
}

}  // namespace qtraj
