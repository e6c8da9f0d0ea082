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
#include <iosfwd>
#include <optional>

namespace qtraj::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kViolations = 1;
inline constexpr int kConfig = 2;
inline constexpr int kAbort = 3;
}  // namespace exit_code

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::filesystem::path> out;
};

/// Oracle and/or ensemble run. Output files are written only after every
/// computation has succeeded; runtimes go to `err`, never into files.
int cmd_run(const std::filesystem::path& config, const Overrides& overrides, std::ostream& out, std::ostream& err);
/// Chain scaling sweep written as one CSV.
int cmd_bench(const std::filesystem::path& config, const Overrides& overrides, std::ostream& out,
              std::ostream& err);
/// Exit 0 iff the model validation report is empty.
int cmd_validate(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
/// Re-runs one trajectory of a run config and dumps its path and jumps.
int cmd_replay(const std::filesystem::path& config, std::uint64_t index, const Overrides& overrides,
               std::ostream& out, std::ostream& err);

}  // namespace qtraj::cli
