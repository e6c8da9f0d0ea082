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
#include <stdexcept>
#include <string>

namespace qtraj {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotHermitianError : public Error {
 public:
  using Error::Error;
};

/// A state, weight, or propagator became NaN/inf. `time()` is where it was
/// first observed.
class NonFiniteError : public Error {
 public:
  NonFiniteError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Jump fired on a channel whose operator annihilates the current state.
class DarkStateJump : public Error {
 public:
  using Error::Error;
};

/// Bernoulli jump probability exceeded the configured p_max.
class StepTooLarge : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised by the ensemble engine when one trajectory fails. Carries what is
/// needed to replay the failing realization alone.
class TrajectoryAbort : public Error {
 public:
  TrajectoryAbort(const std::string& what, std::uint64_t index, std::uint64_t seed)
      : Error(what), index_(index), seed_(seed) {}
  std::uint64_t trajectory_index() const { return index_; }
  std::uint64_t master_seed() const { return seed_; }

 private:
  std::uint64_t index_;
  std::uint64_t seed_;
};

}  // namespace qtraj
