// SPDX-License-Identifier: Apache-2.0
//
// holobeam: joint holographic / baseband beamformer design library
// Copyright (C) 2026 The holobeam developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "holobeam/holobeam.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "holobeam: joint holographic / baseband beamforming simulator.\n"
      "Runs the configured algorithm sweep and writes summary.csv, per-cell\n"
      "trace CSVs, channel dumps and a manifest to the output directory."};

  std::string config_path;
  holobeam::CliOverrides overrides;
  std::string algo, seeds, powers, c_grid, out_dir;
  int threads = -1;
  bool verbose = false;

  app.add_option("--config", config_path, "Scenario config file")->required();
  app.add_option("--algo", algo, "Algorithms to run: mm, sr, smm, or all");
  app.add_option("--seeds", seeds, "Seed list, e.g. \"1..20\" or \"3,7,11\"");
  app.add_option("--power-dbm", powers, "Transmit power sweep in dBm, e.g. \"16,24\"");
  app.add_option("--c", c_grid, "Scaling grid for smm, e.g. \"1,0.5,0.1\"");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads (0 = hardware)");
  app.add_flag("--verbose", verbose, "Log every finished cell");

  CLI11_PARSE(app, argc, argv);

  if (verbose) {
    setenv("HOLOBEAM_LOG", "debug", 1);
  }
  if (!algo.empty()) overrides.algo = algo;
  if (!seeds.empty()) overrides.seeds = seeds;
  if (!powers.empty()) overrides.powers_dbm = powers;
  if (!c_grid.empty()) overrides.c_grid = c_grid;
  if (!out_dir.empty()) overrides.output_dir = out_dir;
  if (threads >= 0) overrides.threads = threads;

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config file " << config_path << "\n";
      return 2;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string config_text = buffer.str();

    holobeam::ScenarioConfig cfg = holobeam::parse_scenario(config_text);
    holobeam::apply_overrides(cfg, overrides);

    const holobeam::ExperimentResult result = holobeam::run_experiment(cfg, config_text);
    std::cout << "wrote " << result.rows.size() << " summary rows to "
              << (result.output_dir / "summary.csv").string() << "\n";
    if (result.failures > 0) {
      std::cerr << result.failures << " cell(s) failed; see summary.csv\n";
      return 1;
    }
    return 0;
  } catch (const holobeam::ConfigValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
