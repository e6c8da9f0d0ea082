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

#include <iostream>

#include <CLI11.hpp>

#include "qtraj_cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Influence-martingale quantum trajectories and master-equation oracle"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::uint64_t index = 0;

  auto add_common = [&](CLI::App* cmd, bool overrides) {
    cmd->add_option("--config", config, "Config file")->required();
    if (overrides) {
      cmd->add_option("--seed", seed, "Override the master seed");
      cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
      cmd->add_option("--out", out, "Output directory");
    }
  };
  auto* run = app.add_subcommand("run", "Oracle and/or trajectory ensemble");
  add_common(run, true);
  auto* bench = app.add_subcommand("bench", "Chain scaling sweep");
  add_common(bench, true);
  auto* validate = app.add_subcommand("validate", "Check a model definition");
  add_common(validate, false);
  auto* replay = app.add_subcommand("replay", "Re-run one trajectory of an ensemble");
  add_common(replay, true);
  replay->add_option("--index", index, "Trajectory index")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qtraj::cli::exit_code::kConfig;
  }

  qtraj::cli::Overrides o;
  o.seed = seed;
  o.threads = threads;
  if (out) o.out = *out;
  if (run->parsed()) return qtraj::cli::cmd_run(config, o, std::cout, std::cerr);
  if (bench->parsed()) return qtraj::cli::cmd_bench(config, o, std::cout, std::cerr);
  if (validate->parsed()) return qtraj::cli::cmd_validate(config, std::cout, std::cerr);
  return qtraj::cli::cmd_replay(config, index, o, std::cout, std::cerr);
}
