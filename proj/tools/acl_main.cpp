// Copyright 2026 The acl Authors
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
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acl/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"adaptive consensus control: verify, run, and sweep scenarios"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir;
  bool force = false;
  std::vector<std::size_t> coords{1, 3};
  std::vector<double> sigmas;
  std::string fixture_name;

  CLI::App* verify = app.add_subcommand("verify", "static checks and rate certificate");
  verify->add_option("scenario", scenario, "scenario JSON file")->required();

  CLI::App* run = app.add_subcommand("run", "simulate and emit CSV/SVG artifacts");
  run->add_option("scenario", scenario, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_flag("--force", force, "run even if verification fails");
  run->add_option("--coords", coords,
                  "1-based state coordinates to plot (default 1,3)")
      ->delimiter(',');

  CLI::App* sweep = app.add_subcommand("sweep", "one run per quantization level");
  sweep->add_option("scenario", scenario, "scenario JSON file")->required();
  sweep->add_option("--sigma", sigmas, "comma-separated quantization levels")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", out_dir, "output directory")->required();

  CLI::App* fixture = app.add_subcommand("fixture", "print a built-in scenario JSON");
  fixture->add_option("name", fixture_name, "fixture name (paper-s5)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      return acl::cmd_verify(scenario, std::cout).ok() ? 0 : 1;
    }
    if (run->parsed()) {
      return acl::cmd_run(scenario, out_dir, force, coords, std::cout).ok() ? 0 : 1;
    }
    if (sweep->parsed()) {
      return acl::cmd_sweep_sigma(scenario, sigmas, out_dir, std::cout).ok() ? 0 : 1;
    }
    if (fixture->parsed()) {
      std::cout << acl::emit_scenario(acl::builtin_fixture(fixture_name)) << "\n";
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 1;
}
