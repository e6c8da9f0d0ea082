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

#include "qtraj/time_scalar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "qtraj/errors.hpp"

namespace qtraj {

TimeScalar::TimeScalar() : bound_(0.0), description_("0") {}

TimeScalar TimeScalar::constant(double value) {
  TimeScalar s;
  s.kind_ = Kind::Constant;
  s.constant_ = value;
  s.bound_ = std::abs(value);
  s.description_ = fmt::format("{}", value);
  return s;
}

TimeScalar TimeScalar::function(Function f, std::optional<double> bound, std::string description) {
  if (!f) {
    throw std::invalid_argument("TimeScalar::function: empty callable");
  }
  TimeScalar s;
  s.kind_ = Kind::Function;
  s.fn_ = std::make_shared<const Function>(std::move(f));
  s.bound_ = bound;
  s.description_ = description.empty() ? "f(t)" : std::move(description);
  return s;
}

TimeScalar TimeScalar::tabulated(std::vector<double> times, std::vector<double> values) {
  if (times.empty() || times.size() != values.size()) {
    throw std::invalid_argument("TimeScalar::tabulated: need equally many times and values");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw std::invalid_argument("TimeScalar::tabulated: times must be strictly increasing");
    }
  }
  double sup = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("TimeScalar::tabulated: non-finite sample");
    }
    sup = std::max(sup, std::abs(v));
  }
  TimeScalar s;
  s.kind_ = Kind::Table;
  s.description_ = fmt::format("table[{}]", times.size());
  s.times_ = std::make_shared<const std::vector<double>>(std::move(times));
  s.values_ = std::make_shared<const std::vector<double>>(std::move(values));
  s.bound_ = sup;
  return s;
}

double TimeScalar::operator()(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return constant_;
    case Kind::Function:
      return (*fn_)(t);
    case Kind::Table: {
      const auto& ts = *times_;
      const auto& vs = *values_;
      if (t <= ts.front()) {
        return vs.front();
      }
      if (t >= ts.back()) {
        return vs.back();
      }
      const auto it = std::upper_bound(ts.begin(), ts.end(), t);
      const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
      const std::size_t lo = hi - 1;
      const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
      return (1.0 - w) * vs[lo] + w * vs[hi];
    }
  }
  return 0.0;
}

double TimeScalar::sampled_sup(double t0, double t1, int samples) const {
  double sup = 0.0;
  const int n = std::max(samples, 2);
  for (int k = 0; k < n; ++k) {
    const double t = t0 + (t1 - t0) * k / (n - 1);
    sup = std::max(sup, std::abs((*this)(t)));
  }
  return sup;
}

}  // namespace qtraj
